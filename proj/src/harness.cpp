#include "teachdemo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include <spdlog/spdlog.h>

#include "teachdemo/actions.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/errors.hpp"

namespace teachdemo {

const char* to_string(SessionStatus s) noexcept {
    switch (s) {
        case SessionStatus::Answered: return "answered";
        case SessionStatus::Unterminated: return "unterminated";
        case SessionStatus::Aborted: return "aborted";
    }
    return "?";
}

std::optional<SessionStatus> parse_session_status(std::string_view s) noexcept {
    if (s == "answered") return SessionStatus::Answered;
    if (s == "unterminated") return SessionStatus::Unterminated;
    if (s == "aborted") return SessionStatus::Aborted;
    return std::nullopt;
}

std::optional<std::int64_t> extract_answer(std::string_view transcript) {
    const std::vector<Token> tokens = lex(transcript);
    const ParseResult pr = parse_actions(tokens, ParseMode::Tolerant, true);
    for (auto it = pr.actions.rbegin(); it != pr.actions.rend(); ++it) {
        if (const auto* n = std::get_if<NoOp>(&*it)) {
            if (auto v = parse_final_remainder(n->text)) {
                return v;
            }
        }
    }
    return std::nullopt;
}

namespace {

bool is_space(char c) noexcept { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct PairTokens {
    std::size_t coord;
    std::optional<std::size_t> symbol;
};

// Coordinate/symbol token pairs of the look starting at tokens[begin],
// paired exactly as the parser pairs them. A coordinate whose next token is
// not a symbol comes back without one.
std::vector<PairTokens> look_pairs(const std::vector<Token>& tokens, std::size_t begin) {
    std::vector<PairTokens> out;
    std::size_t i = begin + 1;
    while (i < tokens.size()) {
        const TokenKind k = tokens[i].kind;
        if (k == TokenKind::Write || k == TokenKind::Look || k == TokenKind::Clear || k == TokenKind::LBrace ||
            k == TokenKind::RBrace) {
            break;
        }
        if (k != TokenKind::RunCoord) {
            ++i;
            continue;
        }
        if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::Symbol &&
            is_action_symbol(tokens[i + 1].symbol())) {
            out.push_back({i, i + 1});
            i += 2;
        } else {
            out.push_back({i, std::nullopt});
            ++i;
        }
    }
    return out;
}

class SessionRunner {
public:
    SessionRunner(Generator& gen, const Problem& problem, const SessionConfig& config, const std::string& id)
        : gen_(gen), config_(config) {
        r_.session_id = id;
        r_.problem = problem;
    }

    SessionResult run() {
        const std::string prompt = question_prompt(r_.problem);
        int feedbacks = 0;
        int trim = 0;
        bool regenerating = false;
        while (true) {
            GenerateRequest req;
            req.session_id = r_.session_id;
            req.prefix = prompt + r_.transcript;
            req.max_new_tokens = config_.max_new_tokens;
            req.trim_tokens = trim;
            GenerateResponse resp;
            try {
                resp = gen_.generate(req);
            } catch (const Error& e) {
                r_.diagnostics.push_back(std::string("generator failed: ") + e.what());
                finish(SessionStatus::Aborted);
                break;
            }
            ++(regenerating ? r_.regenerations : r_.rounds_used);
            r_.transcript += resp.text;

            const Outcome outcome = process(resp.eos, true);
            if (outcome == Outcome::Answered) {
                finish(SessionStatus::Answered);
                break;
            }
            if (outcome == Outcome::Aborted) {
                finish(SessionStatus::Aborted);
                break;
            }
            if (outcome == Outcome::Forced) {
                if (static_cast<int>(r_.forcing_events.size()) > config_.max_forcing_events ||
                    r_.regenerations >= config_.max_regenerations) {
                    r_.diagnostics.push_back("forcing limit reached");
                    wrap_up();
                    break;
                }
                regenerating = true;
                continue;
            }
            regenerating = false;
            if (resp.eos || feedbacks >= config_.max_rounds) {
                wrap_up();
                break;
            }
            ++feedbacks;
            trim += config_.trim_tokens;
        }
        return std::move(r_);
    }

private:
    enum class Outcome { Continue, Forced, Answered, Aborted };

    // Executes whatever is still pending without forcing and settles the
    // status from the transcript as it stands.
    void wrap_up() {
        const Outcome o = process(true, false);
        finish(o == Outcome::Answered ? SessionStatus::Answered
               : o == Outcome::Aborted ? SessionStatus::Aborted
                                       : SessionStatus::Unterminated);
    }

    void finish(SessionStatus status) {
        r_.status = status;
        if (status == SessionStatus::Answered) {
            r_.answer = answer_;
        } else {
            r_.answer = extract_answer(r_.transcript);
        }
        r_.correct = status == SessionStatus::Answered && r_.answer && *r_.answer == r_.problem.remainder();
    }

    void note_diagnostics(const ParseResult& pr, const std::vector<Token>& tokens, std::size_t base,
                          std::size_t before_token) {
        for (const ParseDiagnostic& d : pr.diagnostics) {
            if (d.token_index >= before_token) {
                continue;
            }
            r_.diagnostics.push_back(std::string(to_string(d.kind)) + " at offset " +
                                     std::to_string(base + tokens[d.token_index].offset) + ": " + d.context);
            ++malformed_;
        }
    }

    // Checks the pairs of the look at tokens[look_at], whose offsets are
    // relative to transcript byte `base`. Returns true when the transcript
    // was amended and generation must restart.
    bool check_look(const std::vector<Token>& tokens, std::size_t base, std::size_t look_at) {
        for (const PairTokens& p : look_pairs(tokens, look_at)) {
            const Token& ct = tokens[p.coord];
            const Coord coord = ct.run_coord.coord;
            const char env = r_.grid.read(coord);
            if (config_.forcing == ForcingMode::Eager) {
                if (p.symbol && base + tokens[*p.symbol].offset < eager_frontier_) {
                    continue;
                }
                const char model = p.symbol ? tokens[*p.symbol].symbol() : kEmptySymbol;
                r_.transcript.resize(base + ct.offset + ct.text.size());
                r_.transcript += ' ';
                const std::size_t at = r_.transcript.size();
                r_.transcript += env;
                eager_frontier_ = r_.transcript.size();
                if (p.symbol && model != env) {
                    r_.forcing_events.push_back({coord, model, env, at});
                }
                return true;
            }
            if (!p.symbol) {
                continue;
            }
            const Token& st = tokens[*p.symbol];
            if (st.symbol() != env) {
                const std::size_t at = base + st.offset;
                r_.forcing_events.push_back({coord, st.symbol(), env, at});
                r_.transcript.resize(at);
                r_.transcript += env;
                return true;
            }
        }
        return false;
    }

    Outcome process(bool final, bool may_force) {
        const std::size_t base = committed_;
        const std::string_view text = std::string_view(r_.transcript).substr(base);
        std::size_t stable = text.size();
        if (!final && !text.empty() && !is_space(text.back())) {
            // The last lexeme may continue in the next round.
            while (stable > 0 && !is_space(text[stable - 1])) {
                --stable;
            }
        }
        const std::vector<Token> tokens = lex(text.substr(0, stable));
        const ParseResult pr = parse_actions(tokens, ParseMode::Tolerant, final);

        for (std::size_t i = 0; i < pr.actions.size(); ++i) {
            const Action& action = pr.actions[i];
            const TokenSpan span = pr.spans[i];
            if (may_force && is_look(action) && check_look(tokens, base, span.begin)) {
                note_diagnostics(pr, tokens, base, span.begin);
                committed_ = base + tokens[span.begin].offset;
                return abort_on_malformed() ? Outcome::Aborted : Outcome::Forced;
            }
            for (const LookMismatch& m : execute(action, r_.grid)) {
                if (m.kind == LookMismatch::Kind::Count) {
                    ++r_.count_mismatches;
                    r_.diagnostics.push_back("count mismatch at " + format_coord(m.coord) + ": recorded " +
                                             std::to_string(m.recorded_count) + ", grid " +
                                             std::to_string(m.expected_count));
                }
            }
            const Token& last = tokens[span.end - 1];
            committed_ = base + last.offset + last.text.size();
            if (const auto* n = std::get_if<NoOp>(&action)) {
                if (auto v = parse_final_remainder(n->text)) {
                    note_diagnostics(pr, tokens, base, span.end);
                    answer_ = *v;
                    r_.transcript.resize(committed_);
                    return Outcome::Answered;
                }
            }
        }
        note_diagnostics(pr, tokens, base, tokens.size());
        if (abort_on_malformed()) {
            return Outcome::Aborted;
        }
        if (pr.trailing_begin < tokens.size()) {
            committed_ = base + tokens[pr.trailing_begin].offset;
            if (may_force && tokens[pr.trailing_begin].kind == TokenKind::Look &&
                check_look(tokens, base, pr.trailing_begin)) {
                return Outcome::Forced;
            }
        } else {
            committed_ = base + stable;
        }
        return Outcome::Continue;
    }

    bool abort_on_malformed() const noexcept {
        return config_.malformed == MalformedPolicy::Abort && malformed_ > 0;
    }

    Generator& gen_;
    const SessionConfig& config_;
    SessionResult r_;
    std::size_t committed_ = 0;       // transcript bytes whose actions have been executed
    std::size_t eager_frontier_ = 0;  // transcript bytes whose look symbols came from the grid
    std::int64_t answer_ = 0;
    int malformed_ = 0;
};

std::string session_name(const std::string& prefix, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%05zu", index);
    return prefix + buf;
}

}  // namespace

SessionResult run_session(Generator& generator, const Problem& problem, const SessionConfig& config,
                          const std::string& session_id) {
    validate(problem);
    if (config.max_rounds < 0 || config.trim_tokens < 0 || config.max_new_tokens < 1) {
        throw std::invalid_argument("session limits must be non-negative and max_new_tokens positive");
    }
    return SessionRunner(generator, problem, config, session_id).run();
}

std::vector<SessionResult> run_sessions(const GeneratorFactory& factory, const std::vector<Problem>& problems,
                                        const SessionConfig& config, int jobs, const std::string& id_prefix) {
    std::vector<SessionResult> results(problems.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < problems.size(); i = next++) {
            const std::string id = session_name(id_prefix, i);
            GeneratorPtr gen = factory(id);
            results[i] = run_session(*gen, problems[i], config, id);
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(problems.size())));
    if (n == 1) {
        worker();
        return results;
    }
    std::vector<std::thread> threads;
    for (int t = 0; t < n; ++t) {
        threads.emplace_back(worker);
    }
    for (std::thread& t : threads) {
        t.join();
    }
    return results;
}

void write_session_log(const SessionResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path transcript_path = dir / (r.session_id + ".txt");
    {
        std::ofstream out(transcript_path, std::ios::binary);
        out << r.transcript;
        if (!out) {
            throw Error("cannot write " + transcript_path.string());
        }
    }
    nlohmann::json events = nlohmann::json::array();
    for (const ForcingEvent& e : r.forcing_events) {
        events.push_back({{"x", e.coord.x},
                          {"y", e.coord.y},
                          {"model_symbol", std::string(1, e.model_symbol)},
                          {"env_symbol", std::string(1, e.env_symbol)},
                          {"transcript_offset", e.transcript_offset}});
    }
    nlohmann::json log{{"session_id", r.session_id},
                       {"question", render_question(r.problem)},
                       {"dividend", r.problem.dividend},
                       {"divisor", r.problem.divisor},
                       {"status", to_string(r.status)},
                       {"answer", r.answer ? nlohmann::json(*r.answer) : nlohmann::json(nullptr)},
                       {"correct", r.correct},
                       {"rounds", r.rounds_used},
                       {"regenerations", r.regenerations},
                       {"count_mismatches", r.count_mismatches},
                       {"forcing_events", events},
                       {"diagnostics", r.diagnostics},
                       {"transcript_path", transcript_path.filename().string()}};
    const std::filesystem::path log_path = dir / (r.session_id + ".json");
    std::ofstream out(log_path, std::ios::binary);
    out << log.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    if (!out) {
        throw Error("cannot write " + log_path.string());
    }
}

std::vector<LoggedSession> read_session_logs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<LoggedSession> out;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("session_id")) {
            spdlog::warn("{}: not a session log, skipped", path.string());
            continue;
        }
        try {
            LoggedSession s;
            s.session_id = j.at("session_id").get<std::string>();
            s.problem = parse_question(j.at("question").get<std::string>());
            s.status = parse_session_status(j.at("status").get<std::string>()).value_or(SessionStatus::Aborted);
            if (!j.at("answer").is_null()) {
                s.answer = j.at("answer").get<std::int64_t>();
            }
            s.correct = j.at("correct").get<bool>();
            s.forcing_events = static_cast<int>(j.at("forcing_events").size());
            s.rounds = j.at("rounds").get<int>();
            const std::filesystem::path tp = path.parent_path() / j.at("transcript_path").get<std::string>();
            std::ifstream tin(tp, std::ios::binary);
            std::ostringstream ss;
            ss << tin.rdbuf();
            s.transcript = ss.str();
            out.push_back(std::move(s));
        } catch (const std::exception& e) {
            spdlog::warn("{}: malformed session log ({}), skipped", path.string(), e.what());
        }
    }
    return out;
}

}  // namespace teachdemo
