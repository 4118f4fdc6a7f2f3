#include "doctest.h"

#include "support.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/errors.hpp"
#include "teachdemo/harness.hpp"

using namespace teachdemo;
namespace fs = std::filesystem;

namespace {

std::string canonical(const Problem& p) { return " " + serialize_actions(demonstrate(p, Variant::Full).actions); }

// Records every request it forwards.
class Recording final : public Generator {
public:
    explicit Recording(GeneratorPtr inner) : inner_(std::move(inner)) {}
    GenerateResponse generate(const GenerateRequest& r) override {
        requests.push_back(r);
        return inner_->generate(r);
    }
    std::vector<GenerateRequest> requests;

private:
    GeneratorPtr inner_;
};

Grid replay(const std::string& transcript) {
    Grid g;
    const auto tokens = lex(transcript);
    for (const Action& a : parse_actions(tokens, ParseMode::Tolerant, true).actions) {
        execute(a, g);
    }
    return g;
}

std::size_t look_symbol_mismatches(const std::string& transcript) {
    Grid g;
    std::size_t n = 0;
    const auto tokens = lex(transcript);
    for (const Action& a : parse_actions(tokens, ParseMode::Tolerant, true).actions) {
        for (const LookMismatch& m : execute(a, g)) {
            n += m.kind == LookMismatch::Kind::Symbol;
        }
    }
    return n;
}

}  // namespace

TEST_CASE("oracle session on 1862 / 16") {
    OracleGenerator g;
    const SessionResult r = run_session(g, {1862, 16}, SessionConfig{});
    CHECK(r.status == SessionStatus::Answered);
    CHECK(r.answer == 6);
    CHECK(r.correct);
    CHECK(r.forcing_events.empty());
    CHECK(r.transcript == canonical({1862, 16}));
    CHECK(r.rounds_used == 2);
    CHECK(r.grid == verify_demonstration(demonstrate({1862, 16}, Variant::Full)).final_grid);
}

TEST_CASE("rounds without eos trim the prefix cumulatively") {
    Recording g(std::make_unique<OracleGenerator>());
    SessionConfig cfg;
    cfg.max_new_tokens = 300;
    const SessionResult r = run_session(g, {1862, 16}, cfg);
    CHECK(r.correct);
    REQUIRE(g.requests.size() == 6);
    for (std::size_t i = 0; i < g.requests.size(); ++i) {
        CHECK(g.requests[i].trim_tokens == static_cast<int>(500 * i));
        CHECK(g.requests[i].max_new_tokens == 300);
        CHECK(g.requests[i].prefix.starts_with(question_prompt({1862, 16})));
    }
}

TEST_CASE("a generator that never answers runs out of rounds") {
    std::vector<std::string> texts(100, " clear");
    auto g = ScriptedGenerator::from_texts(texts);
    SessionConfig cfg;
    cfg.max_rounds = 3;
    const SessionResult r = run_session(*g, {7, 3}, cfg);
    CHECK(r.status == SessionStatus::Unterminated);
    CHECK_FALSE(r.correct);
    CHECK(r.rounds_used == 4);
    CHECK_FALSE(r.answer);
}

TEST_CASE("eos without an answer is unterminated") {
    auto g = ScriptedGenerator::from_texts({" clear"});
    const SessionResult r = run_session(*g, {7, 3}, SessionConfig{});
    CHECK(r.status == SessionStatus::Unterminated);
    CHECK(r.rounds_used == 2);
}

TEST_CASE("a wrong final answer is answered but incorrect") {
    std::string text = canonical({1862, 16});
    text.replace(text.rfind("is 6 }"), 6, "is 7 }");
    auto g = ScriptedGenerator::from_texts({text});
    const SessionResult r = run_session(*g, {1862, 16}, SessionConfig{});
    CHECK(r.status == SessionStatus::Answered);
    CHECK(r.answer == 7);
    CHECK_FALSE(r.correct);
}

TEST_CASE("lazy forcing replaces a wrong look symbol and regenerates from there") {
    const std::string canon = canonical({1862, 16});
    const std::size_t look = canon.find("look 04,01:201 0");
    REQUIRE(look != std::string::npos);
    const std::size_t sym = look + std::string("look 04,01:201 ").size();
    std::string wrong = canon;
    wrong[sym] = '5';
    auto g = ScriptedGenerator::from_texts({wrong, canon.substr(sym + 1)});
    const SessionResult r = run_session(*g, {1862, 16}, SessionConfig{});
    REQUIRE(r.forcing_events.size() == 1);
    const ForcingEvent& e = r.forcing_events[0];
    CHECK(e.coord == Coord{4, 1});
    CHECK(e.model_symbol == '5');
    CHECK(e.env_symbol == '0');
    CHECK(e.transcript_offset == sym);
    CHECK(r.transcript == canon);
    CHECK(r.correct);
    // Scripted replies never set eos, so the closing brace waits for one more round.
    CHECK(r.rounds_used == 2);
    CHECK(r.regenerations == 1);
    REQUIRE(g->requests().size() == 3);
    CHECK(g->requests()[1].prefix == question_prompt({1862, 16}) + canon.substr(0, sym + 1));
}

TEST_CASE("count token disagreements are logged, not forced") {
    std::string text = canonical({1862, 16});
    const std::size_t at = text.find("look 00,02:201 1 01,02:202 6");
    text.replace(at, 16, "look 00,02:205 1");
    auto g = ScriptedGenerator::from_texts({text});
    const SessionResult r = run_session(*g, {1862, 16}, SessionConfig{});
    CHECK(r.correct);
    CHECK(r.forcing_events.empty());
    CHECK(r.count_mismatches == 1);
}

TEST_CASE("malformed output: skipped by default, fatal under abort") {
    std::string text = canonical({1862, 16});
    text.insert(text.find(" clear"), " banana");
    {
        auto g = ScriptedGenerator::from_texts({text});
        const SessionResult r = run_session(*g, {1862, 16}, SessionConfig{});
        CHECK(r.correct);
        CHECK_FALSE(r.diagnostics.empty());
    }
    {
        auto g = ScriptedGenerator::from_texts({text});
        SessionConfig cfg;
        cfg.malformed = MalformedPolicy::Abort;
        const SessionResult r = run_session(*g, {1862, 16}, cfg);
        CHECK(r.status == SessionStatus::Aborted);
        CHECK_FALSE(r.correct);
    }
}

TEST_CASE("output split at arbitrary byte boundaries is reassembled") {
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const Problem p = testsupport::random_problem(rng, 5);
        const std::string canon = canonical(p);
        std::vector<std::string> chunks;
        for (std::size_t at = 0; at < canon.size();) {
            const std::size_t n = static_cast<std::size_t>(rng.between(1, 40));
            chunks.push_back(canon.substr(at, n));
            at += n;
        }
        auto g = ScriptedGenerator::from_texts(chunks);
        SessionConfig cfg;
        cfg.max_rounds = static_cast<int>(chunks.size()) + 1;
        const SessionResult r = run_session(*g, p, cfg);
        REQUIRE(r.correct);
        REQUIRE(r.transcript == canon);
        REQUIRE(r.forcing_events.empty());
    }
}

TEST_CASE("the session stops at the first final no-op") {
    const std::string canon = canonical({7, 3});
    auto g = ScriptedGenerator::from_texts({canon + " { final remainder is 2 } write 00,00:201 x"});
    const SessionResult r = run_session(*g, {7, 3}, SessionConfig{});
    CHECK(r.correct);
    CHECK(r.transcript == canon);
}

TEST_CASE("look noise is always repaired and leaves a consistent transcript") {
    Rng rng(12);
    std::size_t sessions_with_events = 0;
    for (int i = 0; i < 100; ++i) {
        const Problem p = testsupport::random_problem(rng);
        NoiseGenerator g(std::make_unique<OracleGenerator>(), 0.05, NoiseMode::LookSymbols, 3, std::to_string(i));
        const SessionResult r = run_session(g, p, SessionConfig{}, std::to_string(i));
        INFO(p.dividend << " / " << p.divisor);
        REQUIRE(r.correct);
        // Corruptions in discarded tails are counted too.
        CHECK(r.forcing_events.size() <= g.corruptions());
        sessions_with_events += r.forcing_events.empty() ? 0 : 1;
        CHECK(replay(r.transcript) == r.grid);
        CHECK(look_symbol_mismatches(r.transcript) == 0);
        for (const ForcingEvent& e : r.forcing_events) {
            REQUIRE(r.transcript[e.transcript_offset] == e.env_symbol);
            CHECK(e.model_symbol != e.env_symbol);
        }
    }
    CHECK(sessions_with_events > 50);
}

TEST_CASE("eager forcing appends every look symbol from the grid") {
    SessionConfig cfg;
    cfg.forcing = ForcingMode::Eager;
    OracleGenerator oracle;
    const SessionResult clean = run_session(oracle, {1862, 16}, cfg);
    CHECK(clean.correct);
    CHECK(clean.forcing_events.empty());
    CHECK(clean.transcript == canonical({1862, 16}));
    CHECK(clean.regenerations > 100);

    Rng rng(13);
    for (int i = 0; i < 20; ++i) {
        const Problem p = testsupport::random_problem(rng, 4);
        NoiseGenerator g(std::make_unique<OracleGenerator>(), 0.1, NoiseMode::LookSymbols, 3, std::to_string(i));
        const SessionResult r = run_session(g, p, cfg);
        REQUIRE(r.correct);
        CHECK(look_symbol_mismatches(r.transcript) == 0);
        for (const ForcingEvent& e : r.forcing_events) {
            REQUIRE(r.transcript[e.transcript_offset] == e.env_symbol);
            CHECK(e.model_symbol != e.env_symbol);
        }
    }
}

TEST_CASE("written-digit noise can make answers wrong but never breaks the session") {
    Rng rng(14);
    int wrong = 0;
    for (int i = 0; i < 40; ++i) {
        const Problem p = testsupport::random_problem(rng);
        NoiseGenerator g(std::make_unique<OracleGenerator>(), 0.2, NoiseMode::WrittenDigits, 3, std::to_string(i));
        const SessionResult r = run_session(g, p, SessionConfig{});
        CHECK(r.status != SessionStatus::Aborted);
        CHECK(replay(r.transcript) == r.grid);
        CHECK(r.correct == (r.answer == p.remainder() && r.status == SessionStatus::Answered));
        wrong += r.correct ? 0 : 1;
    }
    CHECK(wrong > 0);
}

TEST_CASE("extract_answer") {
    CHECK(extract_answer("write 01,01:201 1 { final remainder is 6 }") == 6);
    CHECK(extract_answer("{ final remainder is 1 0 4 }") == 104);
    CHECK(extract_answer("{ final remainder is 104 }") == 104);
    CHECK(extract_answer("{ final remainder is 1 } clear { final remainder is 2 }") == 2);
    CHECK(extract_answer("{ remainder 6 }") == std::nullopt);
    CHECK(extract_answer("") == std::nullopt);
}

TEST_CASE("invalid problems and limits are rejected") {
    OracleGenerator g;
    CHECK_THROWS_AS(run_session(g, {5, 0}, SessionConfig{}), std::invalid_argument);
    SessionConfig cfg;
    cfg.max_new_tokens = 0;
    CHECK_THROWS_AS(run_session(g, {5, 1}, cfg), std::invalid_argument);
}

TEST_CASE("session pools keep problem order and match serial runs") {
    Rng rng(15);
    std::vector<Problem> problems;
    for (int i = 0; i < 40; ++i) {
        problems.push_back(testsupport::random_problem(rng));
    }
    const auto factory = make_generator_factory("noise:0.05", 9);
    const auto serial = run_sessions(factory, problems, SessionConfig{}, 1);
    const auto parallel = run_sessions(factory, problems, SessionConfig{}, 4);
    REQUIRE(serial.size() == problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i) {
        CHECK(serial[i].session_id == parallel[i].session_id);
        CHECK(serial[i].problem == problems[i]);
        CHECK(serial[i].transcript == parallel[i].transcript);
        CHECK(serial[i].forcing_events.size() == parallel[i].forcing_events.size());
    }
    CHECK(serial[3].session_id == "s00003");
}

TEST_CASE("session logs round-trip") {
    const fs::path dir = fs::temp_directory_path() / "teachdemo-logs";
    fs::remove_all(dir);
    std::vector<Problem> problems{{1862, 16}, {25736, 144, QuestionTemplate::Calculate}};
    const auto results = run_sessions(make_generator_factory("noise:0.05", 1), problems, SessionConfig{});
    for (const SessionResult& r : results) {
        write_session_log(r, dir);
    }
    const auto logs = read_session_logs(dir);
    REQUIRE(logs.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(logs[i].session_id == results[i].session_id);
        CHECK(logs[i].problem == results[i].problem);
        CHECK(logs[i].status == results[i].status);
        CHECK(logs[i].answer == results[i].answer);
        CHECK(logs[i].correct == results[i].correct);
        CHECK(logs[i].forcing_events == static_cast<int>(results[i].forcing_events.size()));
        CHECK(logs[i].rounds == results[i].rounds_used);
        CHECK(logs[i].transcript == results[i].transcript);
    }
    fs::remove_all(dir);
}

TEST_CASE("status names") {
    for (SessionStatus s : {SessionStatus::Answered, SessionStatus::Unterminated, SessionStatus::Aborted}) {
        CHECK(parse_session_status(to_string(s)) == s);
    }
    CHECK_FALSE(parse_session_status("done"));
}
