#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace teachdemo {

enum class QuestionTemplate { WhatIs, Calculate };

inline constexpr std::int64_t kMaxOperand = 99'999'999;  // 8 decimal digits

/// A remainder-after-division question.
struct Problem {
    std::int64_t dividend = 0;  // 0..99'999'999
    std::int64_t divisor = 1;   // 1..99'999'999
    QuestionTemplate question = QuestionTemplate::WhatIs;

    std::int64_t remainder() const noexcept { return dividend % divisor; }
    std::int64_t quotient() const noexcept { return dividend / divisor; }

    friend bool operator==(const Problem&, const Problem&) = default;
};

bool is_valid(const Problem& p) noexcept;
/// Throws std::invalid_argument when `p` is outside the operand ranges.
void validate(const Problem& p);

std::string render_question(const Problem& p);

/// Inverse of render_question. Throws UnrecognizedTemplate.
Problem parse_question(std::string_view text);

/// Position-labeled form: each character of a word is preceded by 200+k
/// (k = 1-based position in the word); every space and the end of the
/// question are rendered as "200 _".
std::string encode_question(std::string_view text);

/// Inverse of encode_question. Throws MalformedEncoding.
std::string decode_question(std::string_view encoded);

/// Prompt handed to a generator: the encoded question followed by " |".
std::string question_prompt(const Problem& p);

}  // namespace teachdemo
