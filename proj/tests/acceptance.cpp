// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "support.hpp"
#include "teachdemo/dataset.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/evaluator.hpp"
#include "teachdemo/generator.hpp"
#include "teachdemo/harness.hpp"

using namespace teachdemo;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

std::string run_command(const std::string& cmd) {
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return out;
    }
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) {
        out.append(buf, n);
    }
    ::pclose(pipe);
    return out;
}

// 500 test questions drawn the way the evaluation sets are drawn.
std::vector<Problem> sampled_questions(std::uint64_t seed, std::size_t n) {
    const Splits s = sample_splits(synthesize_pools(seed, 1500), SplitPlan{200, 100, 500, 500, seed});
    std::vector<Problem> out;
    for (std::size_t i = 0; i < n && i < s.test_mixed.size(); ++i) {
        out.push_back(s.test_mixed[i].problem);
    }
    return out;
}

Outcome golden_record_matches() {
    const auto t0 = Clock::now();
    const std::string out = run_command(std::string(TEACHDEMO_CLI) + " demo --dividend 1862 --divisor 16 --variant full");
    const double dt = seconds_since(t0);
    const bool same = out == testsupport::golden_record();
    return {same && dt < 1.0, std::string(same ? "byte-identical" : "differs from golden") + ", " + fmt_seconds(dt)};
}

Outcome golden_final_grid() {
    Grid g;
    for (const Action& a : parse_strict(testsupport::golden_actions())) {
        execute(a, g);
    }
    const bool ok = g.read({4, 1}) == '1' && g.read({5, 1}) == '1' && g.read({6, 1}) == '6' && g.read({6, 8}) == '6';
    std::string cells;
    for (Coord c : {Coord{4, 1}, Coord{5, 1}, Coord{6, 1}, Coord{6, 8}}) {
        cells += g.read(c);
    }
    return {ok, "quotient/remainder cells read " + cells};
}

Outcome demonstrator_soundness() {
    const auto t0 = Clock::now();
    Rng rng(1000);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const Problem p = testsupport::random_problem(rng);
        const VerifyReport v = verify_demonstration(demonstrate(p, Variant::Full));
        if (!v.ok() || v.final_answer != p.dividend % p.divisor) {
            ++failures;
        }
    }
    const double dt = seconds_since(t0);
    return {failures == 0 && dt < 60.0, std::to_string(1000 - failures) + "/1000 verified, " + fmt_seconds(dt)};
}

Outcome parser_byte_exactness() {
    const std::string golden = testsupport::golden_actions();
    const bool golden_ok = serialize_actions(parse_strict(golden)) == golden;
    Rng rng(10000);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto actions = testsupport::random_actions(rng);
        const std::string text = serialize_actions(actions);
        if (parse_strict(text) != actions || serialize_actions(parse_strict(text)) != text) {
            ++failures;
        }
    }
    return {golden_ok && failures == 0, std::string("golden ") + (golden_ok ? "exact" : "differs") + ", " +
                                            std::to_string(10000 - failures) + "/10000 random lists round-trip"};
}

Outcome run_count_oracle() {
    Rng rng(100);
    std::size_t tokens = 0;
    std::size_t wrong = 0;
    for (int i = 0; i < 100; ++i) {
        const Problem p = testsupport::random_problem(rng);
        testsupport::MapGrid live;
        testsupport::MapGrid history;
        for (const Action& a : demonstrate(p, Variant::Full).actions) {
            if (const auto* l = std::get_if<Look>(&a)) {
                for (const CellSymbol& cs : l->pairs) {
                    ++tokens;
                    wrong += cs.at.count_token != 200 + live.run_count(cs.at.coord);
                }
            } else if (const auto* w = std::get_if<Write>(&a)) {
                for (const CellSymbol& cs : w->pairs) {
                    ++tokens;
                    wrong += cs.at.count_token != 200 + history.run_count(cs.at.coord);
                    live.write(cs.at.coord, cs.symbol);
                    history.write(cs.at.coord, cs.symbol);
                }
            } else if (std::holds_alternative<Clear>(a)) {
                live.clear_scratch();
            }
        }
    }
    return {wrong == 0 && tokens > 0, std::to_string(tokens - wrong) + "/" + std::to_string(tokens) + " count tokens agree"};
}

Outcome forcing_soundness() {
    const auto t0 = Clock::now();
    const std::vector<Problem> questions = sampled_questions(7, 500);
    int oracle_correct = 0;
    std::size_t oracle_events = 0;
    int noisy_correct = 0;
    int corrupted = 0;
    int corrupted_with_event = 0;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const std::string id = "q" + std::to_string(i);
        OracleGenerator oracle;
        const SessionResult a = run_session(oracle, questions[i], SessionConfig{}, id);
        oracle_correct += a.correct;
        oracle_events += a.forcing_events.size();

        NoiseGenerator noisy(std::make_unique<OracleGenerator>(), 0.05, NoiseMode::LookSymbols, 7, id);
        const SessionResult b = run_session(noisy, questions[i], SessionConfig{}, id);
        noisy_correct += b.correct;
        if (noisy.corruptions() > 0) {
            ++corrupted;
            corrupted_with_event += b.forcing_events.empty() ? 0 : 1;
        }
    }
    const double dt = seconds_since(t0);
    const int n = static_cast<int>(questions.size());
    const bool ok = n == 500 && oracle_correct == n && oracle_events == 0 && noisy_correct == n &&
                    corrupted_with_event * 100 >= corrupted * 95 && dt < 300.0;
    return {ok, "oracle " + std::to_string(oracle_correct) + "/" + std::to_string(n) + " with " +
                    std::to_string(oracle_events) + " events; noise " + std::to_string(noisy_correct) + "/" +
                    std::to_string(n) + ", " + std::to_string(corrupted_with_event) + "/" + std::to_string(corrupted) +
                    " corrupted sessions forced; " + fmt_seconds(dt)};
}

Outcome degradation_curve() {
    const std::vector<Problem> questions = sampled_questions(8, 200);
    const double ps[] = {0.0, 0.01, 0.05, 0.2};
    std::vector<double> acc;
    std::string detail;
    for (double p : ps) {
        int correct = 0;
        for (std::size_t i = 0; i < questions.size(); ++i) {
            const std::string id = "d" + std::to_string(i);
            NoiseGenerator g(std::make_unique<OracleGenerator>(), p, NoiseMode::WrittenDigits, 8, id);
            correct += run_session(g, questions[i], SessionConfig{}, id).correct;
        }
        acc.push_back(static_cast<double>(correct) / static_cast<double>(questions.size()));
        char buf[48];
        std::snprintf(buf, sizeof buf, "%sp=%.2f: %.3f", detail.empty() ? "" : ", ", p, acc.back());
        detail += buf;
    }
    int violations = 0;
    bool within = true;
    for (std::size_t i = 1; i < acc.size(); ++i) {
        if (acc[i] > acc[i - 1]) {
            ++violations;
            within = within && acc[i] - acc[i - 1] <= 0.02;
        }
    }
    return {violations == 0 || (violations == 1 && within), detail};
}

Outcome classifier_fidelity() {
    const auto t0 = Clock::now();
    const auto corpus = mutation_corpus(600, 100);
    int agree = 0;
    for (const Mutation& m : corpus) {
        agree += classify_error(m.problem, m.transcript).category == m.intended;
    }
    const double dt = seconds_since(t0);
    const bool ok = corpus.size() == 600 && agree * 100 >= 95 * static_cast<int>(corpus.size()) && dt < 120.0;
    return {ok, std::to_string(agree) + "/" + std::to_string(corpus.size()) + " classified as intended, " +
                    fmt_seconds(dt)};
}

// Independent projection: drop no-ops (and looks) except the final no-op.
std::vector<Action> strip(const std::vector<Action>& full, bool drop_looks) {
    std::vector<Action> out;
    for (std::size_t i = 0; i < full.size(); ++i) {
        const bool last = i + 1 == full.size();
        if (std::holds_alternative<NoOp>(full[i]) && !last) {
            continue;
        }
        if (drop_looks && std::holds_alternative<Look>(full[i])) {
            continue;
        }
        out.push_back(full[i]);
    }
    return out;
}

Outcome variant_projection() {
    Rng rng(101);
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
        const Problem p = testsupport::random_problem(rng);
        const auto full = demonstrate(p, Variant::Full).actions;
        if (serialize_actions(demonstrate(p, Variant::WriteLook).actions) != serialize_actions(strip(full, false)) ||
            serialize_actions(demonstrate(p, Variant::WriteOnly).actions) != serialize_actions(strip(full, true))) {
            ++failures;
        }
    }
    return {failures == 0, std::to_string(100 - failures) + "/100 problems project exactly"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"golden-record", golden_record_matches},
        {"golden-final-grid", golden_final_grid},
        {"demonstrator-soundness", demonstrator_soundness},
        {"parser-byte-exactness", parser_byte_exactness},
        {"run-count-oracle", run_count_oracle},
        {"forcing-soundness", forcing_soundness},
        {"degradation-curve", degradation_curve},
        {"classifier-fidelity", classifier_fidelity},
        {"variant-projection", variant_projection},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
