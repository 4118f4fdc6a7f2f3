#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teachdemo/actions.hpp"
#include "teachdemo/grid.hpp"
#include "teachdemo/question.hpp"

namespace teachdemo {

/// Which action kinds a demonstration keeps. Every variant ends with the
/// "{ final remainder is N }" no-op.
enum class Variant { Full, WriteLook, WriteOnly, AnswerOnly };

const char* to_string(Variant v) noexcept;
/// Accepts full | writelook | writeonly | answer.
std::optional<Variant> parse_variant(std::string_view name) noexcept;

inline constexpr char kDefaultGlyph = ')';

struct Demonstration {
    Problem problem;
    Variant variant = Variant::Full;
    std::vector<Action> actions;
};

/// Long division by repeated addition, rendered as grid actions.
///
/// Page layout: divisor at (0,2), the division glyph right after it, then the
/// dividend. Quotient digits sit on row 1 above the last digit of each
/// segment; each subtraction takes two rows below its segment. Quotient
/// digits are found on the scratch area (x >= 60) by adding the divisor to a
/// running total (addend rows odd, totals even, right-aligned at x = 72)
/// until the total exceeds the segment.
///
/// Count tokens on looks are read from the live grid. Count tokens on writes
/// come from a history grid that `clear` does not reset, which reproduces the
/// canonical transcript for 1862 / 16 token for token.
Demonstration demonstrate(const Problem& problem, Variant variant, char glyph = kDefaultGlyph);

/// Keeps the action kinds `variant` allows. `full` must be a Full-variant
/// action list ending with the final-remainder no-op.
std::vector<Action> project(const std::vector<Action>& full, Variant variant);

/// encode_question(question) + " | " + serialize_actions(actions)
std::string training_record(const Demonstration& demo);

struct VerifyReport {
    std::vector<LookMismatch> look_mismatches;
    std::optional<std::int64_t> final_answer;
    bool answer_correct = false;
    Grid final_grid;

    bool ok() const noexcept { return look_mismatches.empty() && answer_correct; }
};

/// Replays the demonstration on an empty grid. Throws MissingFinalNoOp when
/// no "final remainder is N" no-op is present.
VerifyReport verify_demonstration(const Demonstration& demo);

/// "final remainder is 1 0 4" or "final remainder is 104" -> 104.
std::optional<std::int64_t> parse_final_remainder(std::string_view noop_text) noexcept;
/// "final remainder is 1 0 4"
std::string final_remainder_text(std::int64_t remainder);

/// Digits of `value` separated by single spaces: 12 -> "1 2".
std::string spell_digits(std::int64_t value);

// ---------------------------------------------------------------------------
// Comparison sub-procedure
// ---------------------------------------------------------------------------

/// Cells on one row, inclusive, that are looked at to read a number. The
/// range may include empty or non-word cells on either side (lookahead); the
/// digits inside it form the operand.
struct CellRange {
    int row = 0;
    int first_x = 0;
    int last_x = 0;
};

/// Relation of operand A to operand B.
enum class Verdict { ALess, AEqual, AGreater };

struct CompareOutcome {
    std::vector<Action> actions;
    Verdict verdict = Verdict::AEqual;
};

/// Emits "{ compare }", the look at A, "{ n digits }", the look at B, the
/// digit-count verdict and, when the counts tie, digit-by-digit looks with
/// "{ a , b equal|larger|smaller }" (the word describes B's digit) up to the
/// first difference. Throws EmptyOperand when a range holds no digits.
CompareOutcome compare_sequence(const Grid& grid, const CellRange& a, const CellRange& b,
                                Variant variant = Variant::Full);

}  // namespace teachdemo
