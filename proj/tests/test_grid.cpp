#include "doctest.h"

#include "support.hpp"
#include "teachdemo/errors.hpp"
#include "teachdemo/grid.hpp"

using namespace teachdemo;
using testsupport::MapGrid;

TEST_CASE("every printable non-space symbol round-trips except the eraser") {
    Grid g;
    for (int c = 33; c < 127; ++c) {
        const char s = static_cast<char>(c);
        g.write({10, 10}, s);
        CHECK(g.read({10, 10}) == s);
    }
    g.write({10, 10}, '_');
    CHECK(g.is_empty({10, 10}));
    CHECK(g.empty());
}

TEST_CASE("empty cells read as underscore") {
    Grid g;
    CHECK(g.read({0, 0}) == kEmptySymbol);
    CHECK(g.read({98, 98}) == kEmptySymbol);
}

TEST_CASE("off-grid and unprintable writes are rejected") {
    Grid g;
    CHECK_THROWS_AS(g.write({99, 0}, 'a'), RangeError);
    CHECK_THROWS_AS(g.write({0, -1}, 'a'), RangeError);
    CHECK_THROWS_AS((void)g.read({-1, 0}), RangeError);
    CHECK_THROWS_AS(g.write({0, 0}, ' '), std::invalid_argument);
    CHECK_THROWS_AS(g.write({0, 0}, '\n'), std::invalid_argument);
}

TEST_CASE("run count examples") {
    Grid g;
    CHECK(g.run_count({5, 0}) == 1);
    g.write({3, 0}, '1');
    g.write({4, 0}, '6');
    CHECK(g.run_count({5, 0}) == 3);
    CHECK(g.run_count({4, 0}) == 2);
    g.write({2, 0}, ')');
    CHECK(g.run_count({5, 0}) == 3);
    g.write({1, 0}, 'x');
    CHECK(g.run_count({2, 0}) == 2);
}

TEST_CASE("run count agrees with a leftward scan over a sparse model") {
    Rng rng(11);
    const std::string alphabet = "ab9Z0+-)_=";
    for (int trial = 0; trial < 200; ++trial) {
        Grid g;
        MapGrid m;
        for (int i = 0; i < 400; ++i) {
            const Coord c{static_cast<int>(rng.below(kGridSize)), static_cast<int>(rng.below(4))};
            const char s = alphabet[rng.below(alphabet.size())];
            g.write(c, s);
            m.write(c, s);
        }
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < kGridSize; ++x) {
                REQUIRE(g.run_count({x, y}) == m.run_count({x, y}));
                REQUIRE(g.read({x, y}) == m.read({x, y}));
            }
        }
    }
}

TEST_CASE("a full row of word characters reports 99 at its end") {
    Grid g;
    for (int x = 0; x < kGridSize - 1; ++x) {
        g.write({x, 3}, 'a');
    }
    CHECK(g.run_count({98, 3}) == 99);
}

TEST_CASE("clear_scratch empties exactly columns 60 and up") {
    Grid g;
    for (int x = 0; x < kGridSize; ++x) {
        g.write({x, 7}, '5');
    }
    g.clear_scratch();
    CHECK(kScratchFirstColumn == 60);
    CHECK(g.read({59, 7}) == '5');
    CHECK(g.read({60, 7}) == kEmptySymbol);
    CHECK(g.read({98, 7}) == kEmptySymbol);
    CHECK(g.occupied() == 60);
}

TEST_CASE("dump lists non-empty rows") {
    Grid g;
    g.write({4, 1}, '1');
    g.write({72, 0}, '0');
    g.write({5, 1}, '+');
    CHECK(g.dump() == "0: 72=0\n1: 4=1 5=+\n");
    CHECK(Grid{}.dump().empty());
}

TEST_CASE("format_coord pads to two digits") {
    CHECK(format_coord({4, 1}) == "04,01");
    CHECK(format_coord({72, 10}) == "72,10");
}
