#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teachdemo/harness.hpp"
#include "teachdemo/question.hpp"

namespace teachdemo {

enum class ErrorCategory { FinalTranscription, InterAreaCopy, InitialTranscription, Comparison, Subtraction, Other };

inline constexpr std::array<ErrorCategory, 6> kAllCategories{
    ErrorCategory::FinalTranscription, ErrorCategory::InterAreaCopy, ErrorCategory::InitialTranscription,
    ErrorCategory::Comparison,         ErrorCategory::Subtraction,   ErrorCategory::Other};

const char* to_string(ErrorCategory c) noexcept;
std::optional<ErrorCategory> parse_error_category(std::string_view s) noexcept;

/// correct / total. An empty list scores 0 and logs a warning.
double score(const std::vector<SessionResult>& results);
double score(const std::vector<bool>& correct);

struct Classification {
    ErrorCategory category = ErrorCategory::Other;
    std::optional<std::size_t> action_index;  // first violating action, if any
    std::size_t offset = 0;                    // its byte offset in the transcript
    std::string detail;
};

/// Replays the transcript against the grid and checks every step for
/// semantic validity: layout against the question, comparison verdicts
/// against the looked digits, arithmetic in addition and subtraction notes,
/// copies against their sources, and the final answer against the
/// remainder that was read. The first violating action decides the
/// category; ties within one action go to InitialTranscription, then
/// Comparison, Subtraction, InterAreaCopy, FinalTranscription, Other. A
/// transcript with no violation (e.g. one that stops early) is Other.
/// Throws OracleUnavailable when no reference layout exists for `problem`.
Classification classify_error(const Problem& problem, std::string_view transcript);

/// A single-fault edit of a canonical transcript.
struct Mutation {
    Problem problem;
    ErrorCategory intended = ErrorCategory::Other;
    std::string transcript;
    std::string description;
};

/// `per_category` mutations for each category, drawn from random problems
/// with 1-8 digit operands. Deterministic under `seed`.
std::vector<Mutation> mutation_corpus(std::uint64_t seed, std::size_t per_category);

}  // namespace teachdemo
