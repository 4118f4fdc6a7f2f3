// Generators and independent oracles shared by the test binaries.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "teachdemo/actions.hpp"
#include "teachdemo/question.hpp"
#include "teachdemo/rng.hpp"

namespace testsupport {

using namespace teachdemo;

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string golden_record() {
    return read_text(std::filesystem::path(TEACHDEMO_SOURCE_DIR) / "tests" / "golden" / "div_1862_16.txt");
}

// The golden file holds "prompt | actions\n".
inline std::string golden_actions() {
    std::string g = golden_record();
    if (!g.empty() && g.back() == '\n') {
        g.pop_back();
    }
    return g.substr(g.find(" | ") + 3);
}

inline std::int64_t pow10(int n) {
    std::int64_t v = 1;
    for (int i = 0; i < n; ++i) {
        v *= 10;
    }
    return v;
}

// Operand with a uniformly drawn digit length in [1, max_digits].
inline std::int64_t random_operand(Rng& rng, int max_digits, std::int64_t min_value) {
    const int digits = static_cast<int>(rng.between(1, max_digits));
    const std::int64_t lo = digits == 1 ? min_value : pow10(digits - 1);
    return rng.between(lo, pow10(digits) - 1);
}

inline Problem random_problem(Rng& rng, int max_digits = 8) {
    Problem p;
    p.dividend = random_operand(rng, max_digits, 0);
    p.divisor = random_operand(rng, max_digits, 1);
    p.question = rng.chance(0.5) ? QuestionTemplate::WhatIs : QuestionTemplate::Calculate;
    return p;
}

// Sparse grid model: absent key = empty cell.
class MapGrid {
public:
    void write(Coord c, char s) {
        if (s == '_') {
            cells_.erase({c.x, c.y});
        } else {
            cells_[{c.x, c.y}] = s;
        }
    }
    char read(Coord c) const {
        const auto it = cells_.find({c.x, c.y});
        return it == cells_.end() ? '_' : it->second;
    }
    void clear_scratch() {
        for (auto it = cells_.begin(); it != cells_.end();) {
            it = it->first.first >= 60 ? cells_.erase(it) : std::next(it);
        }
    }
    // Brute-force leftward scan.
    int run_count(Coord c) const {
        int n = 1;
        for (int x = c.x - 1; x >= 0; --x) {
            const char s = read({x, c.y});
            const bool word = (s >= 'a' && s <= 'z') || (s >= 'A' && s <= 'Z') || (s >= '0' && s <= '9');
            if (!word) {
                break;
            }
            ++n;
        }
        return n;
    }

private:
    std::map<std::pair<int, int>, char> cells_;
};

inline char random_action_symbol(Rng& rng) {
    while (true) {
        const char c = static_cast<char>(rng.between(33, 126));
        if (c != '{' && c != '}') {
            return c;
        }
    }
}

inline std::vector<CellSymbol> random_pairs(Rng& rng) {
    std::vector<CellSymbol> pairs(static_cast<std::size_t>(rng.between(1, 5)));
    for (CellSymbol& p : pairs) {
        p.at.coord = {static_cast<int>(rng.below(kGridSize)), static_cast<int>(rng.below(kGridSize))};
        p.at.count_token = static_cast<int>(rng.between(201, 299));
        p.symbol = random_action_symbol(rng);
    }
    return pairs;
}

inline std::string random_word(Rng& rng) {
    static const std::string kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789+-=,._?";
    std::string w;
    const int n = static_cast<int>(rng.between(1, 6));
    for (int i = 0; i < n; ++i) {
        w += kAlphabet[rng.below(kAlphabet.size())];
    }
    return w;
}

inline std::vector<Action> random_actions(Rng& rng, std::size_t max_len = 30) {
    std::vector<Action> out;
    const std::size_t n = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(max_len)));
    for (std::size_t i = 0; i < n; ++i) {
        switch (rng.below(4)) {
            case 0: out.emplace_back(Write{random_pairs(rng)}); break;
            case 1: out.emplace_back(Look{random_pairs(rng)}); break;
            case 2: out.emplace_back(Clear{}); break;
            default: {
                std::string text;
                const int words = static_cast<int>(rng.between(1, 6));
                for (int w = 0; w < words; ++w) {
                    text += (w ? " " : "") + random_word(rng);
                }
                out.emplace_back(NoOp{text});
            }
        }
    }
    return out;
}

}  // namespace testsupport
