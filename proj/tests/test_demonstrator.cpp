#include "doctest.h"

#include "support.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/errors.hpp"

using namespace teachdemo;

namespace {

// Independent projection: keep the kinds a variant allows, plus the final
// no-op.
std::vector<Action> expected_projection(const std::vector<Action>& full, Variant v) {
    std::vector<Action> out;
    for (std::size_t i = 0; i < full.size(); ++i) {
        const bool last = i + 1 == full.size();
        const Action& a = full[i];
        bool keep = false;
        switch (v) {
            case Variant::Full: keep = true; break;
            case Variant::WriteLook: keep = !is_noop(a) || last; break;
            case Variant::WriteOnly: keep = (!is_noop(a) && !is_look(a)) || last; break;
            case Variant::AnswerOnly: keep = last; break;
        }
        if (keep) {
            out.push_back(a);
        }
    }
    return out;
}

// Row-1 digits left of the scratch area, read left to right.
std::int64_t quotient_on_page(const Grid& g) {
    std::int64_t q = 0;
    for (int x = 0; x < kScratchFirstColumn; ++x) {
        const char c = g.read({x, 1});
        if (c >= '0' && c <= '9') {
            q = q * 10 + (c - '0');
        }
    }
    return q;
}

}  // namespace

TEST_CASE("1862 / 16 reproduces the golden transcript") {
    const Demonstration d = demonstrate({1862, 16, QuestionTemplate::WhatIs}, Variant::Full);
    CHECK(training_record(d) + "\n" == testsupport::golden_record());
}

TEST_CASE("replaying the golden transcript leaves quotient 116 and remainder 6 on the page") {
    Demonstration d;
    d.problem = {1862, 16};
    d.actions = parse_strict(testsupport::golden_actions());
    const VerifyReport r = verify_demonstration(d);
    CHECK(r.look_mismatches.empty());
    CHECK(r.final_answer == 6);
    CHECK(r.answer_correct);
    CHECK(r.final_grid.read({4, 1}) == '1');
    CHECK(r.final_grid.read({5, 1}) == '1');
    CHECK(r.final_grid.read({6, 1}) == '6');
    CHECK(r.final_grid.read({6, 8}) == '6');
}

TEST_CASE("edge problems") {
    SUBCASE("division by one") {
        for (std::int64_t n : {0, 7, 12345, 99999999}) {
            const auto a = demonstrate({n, 1}, Variant::Full).actions;
            CHECK(std::get<NoOp>(a.back()).text == "final remainder is 0");
        }
    }
    SUBCASE("dividend smaller than divisor") {
        const auto d = demonstrate({5, 7}, Variant::Full);
        CHECK(std::get<NoOp>(d.actions.back()).text == "final remainder is 5");
        CHECK(verify_demonstration(d).ok());
    }
    SUBCASE("answer-only is the final no-op alone") {
        const auto d = demonstrate({25736, 144}, Variant::AnswerOnly);
        REQUIRE(d.actions.size() == 1);
        CHECK(std::get<NoOp>(d.actions[0]).text == "final remainder is 1 0 4");
    }
    SUBCASE("largest operands") {
        CHECK(verify_demonstration(demonstrate({99999999, 99999999}, Variant::Full)).ok());
        CHECK(verify_demonstration(demonstrate({99999999, 1}, Variant::Full)).ok());
        CHECK(verify_demonstration(demonstrate({99999999, 9}, Variant::Full)).ok());
        CHECK(verify_demonstration(demonstrate({10000000, 99999999}, Variant::Full)).ok());
    }
}

TEST_CASE("random demonstrations verify, leave the quotient on row 1, and use only the allowed symbols") {
    Rng rng(2024);
    for (int i = 0; i < 500; ++i) {
        const Problem p = testsupport::random_problem(rng);
        const Demonstration d = demonstrate(p, Variant::Full);
        const VerifyReport r = verify_demonstration(d);
        INFO(p.dividend << " / " << p.divisor);
        REQUIRE(r.look_mismatches.empty());
        REQUIRE(r.final_answer == p.remainder());
        CHECK(quotient_on_page(r.final_grid) == p.quotient());
    }
}

TEST_CASE("variants are projections of the full demonstration") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const Problem p = testsupport::random_problem(rng);
        const auto full = demonstrate(p, Variant::Full).actions;
        for (Variant v : {Variant::WriteLook, Variant::WriteOnly, Variant::AnswerOnly}) {
            const auto got = demonstrate(p, v).actions;
            REQUIRE(got == expected_projection(full, v));
            REQUIRE(project(full, v) == got);
            REQUIRE(verify_demonstration({p, v, got}).answer_correct);
        }
    }
}

TEST_CASE("one flipped look symbol is exactly one mismatch") {
    Demonstration d = demonstrate({1862, 16}, Variant::Full);
    for (Action& a : d.actions) {
        if (auto* l = std::get_if<Look>(&a)) {
            l->pairs[0].symbol = l->pairs[0].symbol == '7' ? '8' : '7';
            break;
        }
    }
    const VerifyReport r = verify_demonstration(d);
    CHECK(r.look_mismatches.size() == 1);
    CHECK(r.answer_correct);
    CHECK_FALSE(r.ok());
}

TEST_CASE("a demonstration without a final no-op is refused") {
    Demonstration d = demonstrate({1862, 16}, Variant::Full);
    d.actions.pop_back();
    CHECK_THROWS_AS(verify_demonstration(d), MissingFinalNoOp);
    CHECK_THROWS_AS(project(d.actions, Variant::WriteLook), MissingFinalNoOp);
}

TEST_CASE("the glyph is configurable and any non-word glyph verifies") {
    const auto d = demonstrate({1862, 16}, Variant::Full, '|');
    CHECK(training_record(d).find("02,02:203 |") != std::string::npos);
    CHECK(verify_demonstration(d).ok());
}

TEST_CASE("final remainder text") {
    CHECK(final_remainder_text(104) == "final remainder is 1 0 4");
    CHECK(final_remainder_text(0) == "final remainder is 0");
    CHECK(spell_digits(12) == "1 2");
    CHECK(parse_final_remainder("final remainder is 1 0 4") == 104);
    CHECK(parse_final_remainder("final remainder is 104") == 104);
    CHECK(parse_final_remainder("final remainder is") == std::nullopt);
    CHECK(parse_final_remainder("final remainder is x") == std::nullopt);
    CHECK(parse_final_remainder("remainder is 4") == std::nullopt);
}

TEST_CASE("variant names") {
    for (Variant v : {Variant::Full, Variant::WriteLook, Variant::WriteOnly, Variant::AnswerOnly}) {
        CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK(parse_variant("nope") == std::nullopt);
}

TEST_CASE("compare by digit count, then digit by digit") {
    Grid g;
    const std::string a = "123";
    for (int i = 0; i < 3; ++i) {
        g.write({i, 0}, a[static_cast<std::size_t>(i)]);
    }
    g.write({1, 1}, '4');
    g.write({2, 1}, '5');
    const CompareOutcome shorter = compare_sequence(g, {0, 0, 2}, {1, 0, 2});
    CHECK(shorter.verdict == Verdict::AGreater);
    const std::string text = serialize_actions(shorter.actions);
    CHECK(text.find("{ 3 digits }") != std::string::npos);
    CHECK(text.find("{ 2 digits smaller }") != std::string::npos);

    g.write({0, 1}, '1');
    g.write({1, 1}, '2');
    g.write({2, 1}, '9');
    const CompareOutcome tie = compare_sequence(g, {0, 0, 2}, {1, 0, 2});
    CHECK(tie.verdict == Verdict::ALess);
    const std::string t2 = serialize_actions(tie.actions);
    CHECK(t2.find("{ 3 digits equal }") != std::string::npos);
    CHECK(t2.find("{ 3 , 9 larger }") != std::string::npos);

    CHECK(compare_sequence(g, {0, 0, 2}, {0, 0, 2}).verdict == Verdict::AEqual);
    CHECK_THROWS_AS(compare_sequence(g, {5, 0, 2}, {0, 0, 2}), EmptyOperand);
}
