#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teachdemo/generator.hpp"
#include "teachdemo/grid.hpp"
#include "teachdemo/question.hpp"

namespace teachdemo {

enum class ForcingMode { Lazy, Eager };
enum class MalformedPolicy { SkipLog, Abort };

struct SessionConfig {
    int trim_tokens = 500;   // dropped from the prefix after each round without eos
    int max_rounds = 25;     // times a generation may be fed back as the prefix
    int max_new_tokens = kDefaultMaxNewTokens;
    ForcingMode forcing = ForcingMode::Lazy;
    MalformedPolicy malformed = MalformedPolicy::SkipLog;
    // Regenerations caused by forcing do not use up rounds; these cap them.
    int max_forcing_events = 2000;
    int max_regenerations = 100000;
};

enum class SessionStatus { Answered, Unterminated, Aborted };

const char* to_string(SessionStatus s) noexcept;
std::optional<SessionStatus> parse_session_status(std::string_view s) noexcept;

struct ForcingEvent {
    Coord coord;
    char model_symbol = kEmptySymbol;
    char env_symbol = kEmptySymbol;
    std::size_t transcript_offset = 0;  // byte offset of the symbol in the transcript
};

struct SessionResult {
    std::string session_id;
    Problem problem;
    SessionStatus status = SessionStatus::Unterminated;
    std::optional<std::int64_t> answer;
    bool correct = false;
    std::vector<ForcingEvent> forcing_events;
    int rounds_used = 0;          // generation rounds, forcing regenerations excluded
    int regenerations = 0;        // generations caused by forcing
    int count_mismatches = 0;     // look count tokens that disagreed (logged, not forced)
    std::vector<std::string> diagnostics;
    std::string transcript;       // generated text after the prompt, as amended
    Grid grid;                    // final environment state
};

/// Drives `generator` from the encoded question, executing its actions on a
/// fresh grid and forcing look symbols to agree with the grid. Stops at the
/// first "final remainder is N" no-op, at eos, or when the rounds run out.
SessionResult run_session(Generator& generator, const Problem& problem, const SessionConfig& config,
                          const std::string& session_id = "session");

/// The value of the last "{ final remainder is N }" no-op, spaced or
/// contiguous digits.
std::optional<std::int64_t> extract_answer(std::string_view transcript);

/// Runs every problem with its own generator on `jobs` threads. Results are
/// in problem order; session ids are "<prefix>NNNNN".
std::vector<SessionResult> run_sessions(const GeneratorFactory& factory, const std::vector<Problem>& problems,
                                        const SessionConfig& config, int jobs = 1,
                                        const std::string& id_prefix = "s");

/// One JSON object per session, with the transcript stored alongside as
/// <session_id>.txt in the same directory.
void write_session_log(const SessionResult& result, const std::filesystem::path& dir);

struct LoggedSession {
    std::string session_id;
    Problem problem;
    SessionStatus status = SessionStatus::Unterminated;
    std::optional<std::int64_t> answer;
    bool correct = false;
    int forcing_events = 0;
    int rounds = 0;
    std::string transcript;
};

/// Reads every *.json session log in `dir` (sorted by file name).
std::vector<LoggedSession> read_session_logs(const std::filesystem::path& dir);

}  // namespace teachdemo
