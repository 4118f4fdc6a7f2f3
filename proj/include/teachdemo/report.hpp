#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teachdemo/evaluator.hpp"
#include "teachdemo/harness.hpp"

namespace teachdemo {

// One question of an evaluation run. Column order of the CSV export.
struct EvalRow {
    std::string question;
    std::int64_t dividend = 0;
    std::int64_t divisor = 1;
    std::string variant;
    SessionStatus status = SessionStatus::Unterminated;
    std::optional<std::int64_t> answer;
    bool correct = false;
    std::optional<ErrorCategory> category;  // set exactly when !correct
    int forcing_events = 0;
    int rounds = 0;
};

inline constexpr std::string_view kCsvHeader =
    "question,dividend,divisor,variant,status,answer,correct,category,forcing_events,rounds";

struct EvalReport {
    std::string variant;
    std::string test_set;
    std::map<std::string, std::string> config;  // echo of the run configuration
    std::vector<EvalRow> rows;

    double accuracy() const;
    std::size_t correct() const;
    std::map<ErrorCategory, std::size_t> category_counts() const;
};

/// Rows for `sessions`, each incorrect one classified.
EvalReport build_report(const std::vector<SessionResult>& sessions, std::string variant, std::string test_set,
                        std::map<std::string, std::string> config = {});
EvalReport build_report(const std::vector<LoggedSession>& sessions, std::string variant, std::string test_set,
                        std::map<std::string, std::string> config = {});

std::string report_to_json(const EvalReport& report);
/// Throws Error on a document that is not a report summary.
EvalReport report_from_json(std::string_view text);

/// Validation score of one trained checkpoint.
struct CheckpointScore {
    std::string variant;
    int steps = 0;
    int correct = 0;
};

/// Best score per variant; ties go to the checkpoint with fewer steps.
std::map<std::string, CheckpointScore> select_checkpoints(const std::vector<CheckpointScore>& sweep);

/// "variant,steps,correct" lines; a header line is allowed. Throws Error.
std::vector<CheckpointScore> parse_sweep_csv(std::string_view text);

enum class ReportFormat { Text, Csv };

/// Text: an accuracy table with variants as rows and test sets as columns,
/// a per-category error count table, and (with a sweep) a checkpoint table
/// with the selected checkpoint marked. Csv: kCsvHeader then one line per
/// question. Output does not depend on the order of `reports` or their rows.
std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format,
                          const std::vector<CheckpointScore>& sweep = {});

}  // namespace teachdemo
