#include "teachdemo/grid.hpp"

#include <algorithm>
#include <stdexcept>

#include "teachdemo/errors.hpp"

namespace teachdemo {

namespace {

void require_in_range(Coord c) {
    if (!in_range(c)) {
        throw RangeError("coordinate (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                         ") is outside the 99x99 grid");
    }
}

}  // namespace

void Grid::write(Coord at, char symbol) {
    require_in_range(at);
    if (!is_cell_symbol(symbol)) {
        throw std::invalid_argument("grid symbols must be printable and non-space");
    }
    cells_[index(at.x, at.y)] = symbol == kEmptySymbol ? '\0' : symbol;
}

char Grid::read(Coord at) const {
    require_in_range(at);
    const char c = cells_[index(at.x, at.y)];
    return c == '\0' ? kEmptySymbol : c;
}

int Grid::run_count(Coord at) const {
    require_in_range(at);
    int count = 1;
    for (int x = at.x - 1; x >= 0 && is_word_char(cells_[index(x, at.y)]); --x) {
        ++count;
    }
    return std::min(count, kGridSize);
}

void Grid::clear_scratch() noexcept {
    for (int y = 0; y < kGridSize; ++y) {
        std::fill_n(cells_.begin() + static_cast<std::ptrdiff_t>(index(kScratchFirstColumn, y)),
                    kGridSize - kScratchFirstColumn, '\0');
    }
}

std::size_t Grid::occupied() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](char c) { return c != '\0'; }));
}

std::string Grid::dump() const {
    std::string out;
    for (int y = 0; y < kGridSize; ++y) {
        std::string line;
        for (int x = 0; x < kGridSize; ++x) {
            const char c = cells_[index(x, y)];
            if (c == '\0') {
                continue;
            }
            line += ' ';
            line += std::to_string(x);
            line += '=';
            line += c;
        }
        if (!line.empty()) {
            out += std::to_string(y);
            out += ':';
            out += line;
            out += '\n';
        }
    }
    return out;
}

std::string format_coord(Coord c) {
    std::string s(5, '0');
    s[0] = static_cast<char>('0' + c.x / 10);
    s[1] = static_cast<char>('0' + c.x % 10);
    s[2] = ',';
    s[3] = static_cast<char>('0' + c.y / 10);
    s[4] = static_cast<char>('0' + c.y % 10);
    return s;
}

}  // namespace teachdemo
