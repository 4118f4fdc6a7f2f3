#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string>

namespace teachdemo {

inline constexpr int kGridSize = 99;
// First column of the erasable scratch area (the rightmost two-fifths).
inline constexpr int kScratchFirstColumn = kGridSize - (2 * kGridSize) / 5;
// Symbol reported for empty cells; writing it erases a cell.
inline constexpr char kEmptySymbol = '_';
// Count tokens are rendered as kCountBase + run count (201, 202, ...).
inline constexpr int kCountBase = 200;

struct Coord {
    int x = 0;
    int y = 0;

    friend auto operator<=>(const Coord&, const Coord&) = default;
};

constexpr bool in_range(Coord c) noexcept {
    return c.x >= 0 && c.x < kGridSize && c.y >= 0 && c.y < kGridSize;
}

// A-Z, a-z, 0-9. Anything else breaks a run exactly like an empty cell.
constexpr bool is_word_char(char c) noexcept {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

// Printable, non-space ASCII.
constexpr bool is_cell_symbol(char c) noexcept { return c > ' ' && c < 0x7f; }

/// The 99x99 symbol surface the demonstrations act on.
///
/// Cells are either empty or hold one printable non-space character. Storage
/// is dense; an empty cell is the NUL byte and is never observable as such
/// (read() reports it as '_').
class Grid {
public:
    /// Writes `symbol` at `at`; '_' erases. Throws RangeError off-grid and
    /// std::invalid_argument for spaces and non-printables.
    void write(Coord at, char symbol);

    char read(Coord at) const;
    bool is_empty(Coord at) const { return read(at) == kEmptySymbol; }

    /// 1 + the number of contiguous word characters immediately left of `at`.
    int run_count(Coord at) const;

    /// Empties every cell in columns kScratchFirstColumn..98.
    void clear_scratch() noexcept;

    std::size_t occupied() const noexcept;
    bool empty() const noexcept { return occupied() == 0; }

    /// One line per non-empty row: "y: x=c x=c ...".
    std::string dump() const;

    template <typename Fn>
    void for_each_occupied(Fn&& fn) const {
        for (int y = 0; y < kGridSize; ++y) {
            for (int x = 0; x < kGridSize; ++x) {
                const char c = cells_[index(x, y)];
                if (c != '\0') {
                    fn(Coord{x, y}, c);
                }
            }
        }
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static constexpr std::size_t index(int x, int y) noexcept {
        return static_cast<std::size_t>(y) * kGridSize + static_cast<std::size_t>(x);
    }

    std::array<char, kGridSize * kGridSize> cells_{};
};

std::string format_coord(Coord c);

}  // namespace teachdemo
