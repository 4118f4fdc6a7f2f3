#include "teachdemo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "teachdemo/dataset.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/errors.hpp"
#include "teachdemo/evaluator.hpp"
#include "teachdemo/generator.hpp"
#include "teachdemo/harness.hpp"
#include "teachdemo/protocol.hpp"
#include "teachdemo/report.hpp"

namespace teachdemo {

namespace {

// Bad flag values that CLI11 cannot see (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

Variant variant_arg(const std::string& name) {
    const auto v = parse_variant(name);
    if (!v) {
        throw UsageError("unknown variant '" + name + "' (full, writelook, writeonly, answer)");
    }
    return *v;
}

Problem problem_arg(std::int64_t dividend, std::int64_t divisor, const std::string& question) {
    Problem p{dividend, divisor, question == "calculate" ? QuestionTemplate::Calculate : QuestionTemplate::WhatIs};
    try {
        validate(p);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

char glyph_arg(const std::string& glyph) {
    if (glyph.size() != 1 || is_word_char(glyph[0]) || !is_action_symbol(glyph[0]) || glyph[0] == kEmptySymbol) {
        throw UsageError("glyph must be one printable non-word character other than '_'");
    }
    return glyph[0];
}

// --- build-datasets --------------------------------------------------------

struct BuildArgs {
    std::string data_dir;
    bool synthetic = false;
    std::size_t per_pool = 3000;
    std::uint64_t seed = 0;
    std::string variant = "all";
    std::string marker{kDefaultMarker};
    std::string out = "datasets";
};

int cmd_build(const BuildArgs& a) {
    std::vector<Variant> variants;
    if (a.variant == "all") {
        variants = {Variant::Full, Variant::WriteLook, Variant::WriteOnly, Variant::AnswerOnly};
    } else {
        variants = {variant_arg(a.variant)};
    }
    std::string data_dir = a.data_dir;
    if (data_dir.empty() && !a.synthetic) {
        if (const char* env = std::getenv("TEACH_DEMO_DATA_DIR")) {
            data_dir = env;
        }
    }
    if (data_dir.empty() && !a.synthetic) {
        throw UsageError("no --data-dir (or TEACH_DEMO_DATA_DIR) given; pass --synthetic to generate questions");
    }
    const Pools pools = a.synthetic ? synthesize_pools(a.seed, a.per_pool) : load_pools(data_dir);
    SplitPlan plan;
    plan.seed = a.seed;
    const Splits splits = sample_splits(pools, plan);

    const std::filesystem::path out(a.out);
    write_qa_file(splits.train, out / "train_questions.txt");
    write_qa_file(splits.validation, out / "validation.txt");
    write_qa_file(splits.test_mixed, out / "test_mixed.txt");
    write_qa_file(splits.test_interpolated, out / "test_interpolated.txt");
    for (Variant v : variants) {
        BuildOptions opt;
        opt.variant = v;
        opt.marker = a.marker;
        opt.seed = a.seed;
        opt.synthetic = a.synthetic;
        opt.split_name = "train";
        const std::filesystem::path path = out / to_string(v) / "train.txt";
        std::filesystem::create_directories(path.parent_path());
        const Manifest m = build_training_file(splits.train, opt, path);
        std::cout << path.string() << ": " << m.entries.at("records") << " records, " << m.entries.at("checksum")
                  << '\n';
    }
    return kExitOk;
}

// --- demo / verify / dump --------------------------------------------------

struct DemoArgs {
    std::int64_t dividend = 0;
    std::int64_t divisor = 0;
    std::string variant = "full";
    std::string question = "whatis";
    std::string glyph{kDefaultGlyph};
};

int cmd_demo(const DemoArgs& a) {
    const Problem p = problem_arg(a.dividend, a.divisor, a.question);
    std::cout << training_record(demonstrate(p, variant_arg(a.variant), glyph_arg(a.glyph))) << '\n';
    return kExitOk;
}

int cmd_dump(const DemoArgs& a) {
    const Problem p = problem_arg(a.dividend, a.divisor, a.question);
    const VerifyReport r = verify_demonstration(demonstrate(p, variant_arg(a.variant), glyph_arg(a.glyph)));
    std::cout << r.final_grid.dump();
    return kExitOk;
}

struct VerifyArgs {
    DemoArgs demo;
    bool from_problem = false;
    std::string file;
    std::string marker{kDefaultMarker};
};

// Verifies one "prompt | actions" record; prints a line per failure.
bool verify_record(std::string_view record, std::size_t index) {
    const ParsedRecord pr = parse_record(record);
    Demonstration d;
    d.problem = parse_question(pr.question);
    d.actions = pr.actions;
    const VerifyReport r = verify_demonstration(d);
    if (r.ok()) {
        return true;
    }
    std::cout << "record " << index << " (" << pr.question << "): " << r.look_mismatches.size()
              << " look mismatches, answer "
              << (r.final_answer ? std::to_string(*r.final_answer) : std::string("none")) << ", expected "
              << d.problem.remainder() << '\n';
    return false;
}

int cmd_verify(const VerifyArgs& a) {
    if (a.from_problem) {
        const Problem p = problem_arg(a.demo.dividend, a.demo.divisor, a.demo.question);
        const VerifyReport r = verify_demonstration(demonstrate(p, variant_arg(a.demo.variant), glyph_arg(a.demo.glyph)));
        std::cout << (r.ok() ? "ok" : "FAILED") << ": " << r.look_mismatches.size() << " look mismatches, answer "
                  << (r.final_answer ? std::to_string(*r.final_answer) : std::string("none")) << '\n';
        return r.ok() ? kExitOk : kExitRuntime;
    }
    std::string text;
    if (a.file.empty() || a.file == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        text = read_file(a.file);
    }
    const std::vector<std::string> records = split_records(text, a.marker);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        try {
            if (!verify_record(records[i], i)) {
                ++failed;
            }
        } catch (const Error& e) {
            std::cout << "record " << i << ": " << e.what() << '\n';
            ++failed;
        }
    }
    std::cout << (failed == 0 ? "ok" : "FAILED") << ": " << records.size() - failed << " of " << records.size()
              << " records verified\n";
    return failed == 0 ? kExitOk : kExitRuntime;
}

// --- evaluate --------------------------------------------------------------

struct EvalArgs {
    std::string generator = "oracle";
    std::string questions;
    int jobs = 1;
    std::uint64_t seed = 0;
    std::string out = "eval";
    std::string variant = "full";
    std::string test_set;
    std::size_t limit = 0;
    int timeout_ms = 60000;
    SessionConfig session;
    std::string forcing = "lazy";
    std::string malformed = "skip";
};

int cmd_evaluate(EvalArgs a) {
    if (a.jobs < 1) {
        throw UsageError("--jobs must be at least 1");
    }
    if (a.session.max_rounds < 1 || a.session.trim_tokens < 0 || a.session.max_new_tokens < 1) {
        throw UsageError("--max-rounds and --max-new-tokens must be positive, --trim-tokens non-negative");
    }
    a.session.forcing = a.forcing == "eager" ? ForcingMode::Eager : ForcingMode::Lazy;
    a.session.malformed = a.malformed == "abort" ? MalformedPolicy::Abort : MalformedPolicy::SkipLog;
    GeneratorFactory factory;
    try {
        factory = make_generator_factory(a.generator, a.seed, a.timeout_ms);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::vector<Problem> problems = load_questions(a.questions);
    if (a.limit > 0 && problems.size() > a.limit) {
        problems.resize(a.limit);
    }
    if (a.test_set.empty()) {
        a.test_set = std::filesystem::path(a.questions).stem().string();
    }
    spdlog::info("evaluating {} questions from {} with {} on {} jobs", problems.size(), a.questions, a.generator,
                 a.jobs);
    const std::vector<SessionResult> results = run_sessions(factory, problems, a.session, a.jobs);

    const std::filesystem::path out(a.out);
    const std::filesystem::path sessions_dir = out / "sessions";
    std::filesystem::create_directories(sessions_dir);
    for (const SessionResult& r : results) {
        write_session_log(r, sessions_dir);
    }
    const std::map<std::string, std::string> config{
        {"generator", a.generator},
        {"questions", a.questions},
        {"seed", std::to_string(a.seed)},
        {"jobs", std::to_string(a.jobs)},
        {"trim_tokens", std::to_string(a.session.trim_tokens)},
        {"max_rounds", std::to_string(a.session.max_rounds)},
        {"max_new_tokens", std::to_string(a.session.max_new_tokens)},
        {"forcing", a.session.forcing == ForcingMode::Eager ? "eager" : "lazy"},
        {"malformed", a.session.malformed == MalformedPolicy::Abort ? "abort" : "skip"},
    };
    const EvalReport report = build_report(results, a.variant, a.test_set, config);
    write_file(out / "summary.json", report_to_json(report));
    write_file(out / "report.csv", render_report({report}, ReportFormat::Csv));

    std::size_t events = 0;
    for (const SessionResult& r : results) {
        events += r.forcing_events.size();
    }
    std::cout << "accuracy " << report.accuracy() << " (" << report.correct() << "/" << report.rows.size()
              << "), forcing events " << events << '\n';
    std::cout << render_report({report}, ReportFormat::Text);
    return kExitOk;
}

// --- classify / report / serve-oracle --------------------------------------

int cmd_classify(const std::string& dir, const std::string& variant) {
    if (!std::filesystem::is_directory(dir)) {
        throw UsageError("--sessions must name a directory of session logs");
    }
    const std::vector<LoggedSession> logs = read_session_logs(dir);
    std::vector<LoggedSession> wrong;
    for (const LoggedSession& s : logs) {
        if (s.correct) {
            continue;
        }
        wrong.push_back(s);
        try {
            const Classification c = classify_error(s.problem, s.transcript);
            std::cout << s.session_id << ' ' << to_string(c.category) << " action="
                      << (c.action_index ? std::to_string(*c.action_index) : std::string("-")) << ' ' << c.detail
                      << '\n';
        } catch (const OracleUnavailable& e) {
            std::cout << s.session_id << ' ' << to_string(ErrorCategory::Other) << " action=- " << e.what() << '\n';
        }
    }
    const EvalReport report = build_report(logs, variant, std::filesystem::path(dir).filename().string());
    std::cout << wrong.size() << " of " << logs.size() << " sessions incorrect\n";
    for (const auto& [cat, n] : report.category_counts()) {
        std::cout << to_string(cat) << ' ' << n << '\n';
    }
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& format, const std::string& sweep_path) {
    std::vector<EvalReport> reports;
    for (const std::string& in : inputs) {
        reports.push_back(report_from_json(read_file(in)));
    }
    std::vector<CheckpointScore> sweep;
    if (!sweep_path.empty()) {
        sweep = parse_sweep_csv(read_file(sweep_path));
    }
    if (reports.empty() && sweep.empty()) {
        throw UsageError("nothing to report: give --in and/or --sweep");
    }
    std::cout << render_report(reports, format == "csv" ? ReportFormat::Csv : ReportFormat::Text, sweep);
    return kExitOk;
}

int cmd_serve(const std::string& listen, const std::string& generator, std::uint64_t seed, bool serial) {
    GeneratorFactory factory;
    try {
        factory = make_generator_factory(generator, seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (listen != "stdio" && !listen.starts_with("tcp://")) {
        throw UsageError("--listen must be stdio or tcp://host:port");
    }
    g_stop.store(false);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    serve(listen, factory, !serial, &g_stop);
    return kExitOk;
}

void setup_logging(bool verbose, bool quiet) {
    auto logger = spdlog::get("teachdemo");
    if (!logger) {
        logger = spdlog::stderr_color_mt("teachdemo");
    }
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::warn);
}

bool truthy(const std::string& v) { return v == "true" || v == "1" || v == "yes" || v == "on"; }

// CLI11 only reads config files for the root app, so a subcommand's
// --config is expanded here into the flags it names. Flags already on the
// command line win. Keys may use '_' for '-' and may sit under [subcommand].
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    std::size_t sub_at = 0;
    CLI::App* sub = nullptr;
    for (; sub_at < args.size(); ++sub_at) {
        if (!args[sub_at].starts_with("-")) {
            sub = app.get_subcommand_no_throw(args[sub_at]);
            break;
        }
    }
    if (sub == nullptr) {
        return args;
    }
    std::string path;
    for (std::size_t i = sub_at + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) {
        return args;
    }
    const auto given = [&](const std::string& flag) {
        return std::any_of(args.begin() + static_cast<std::ptrdiff_t>(sub_at) + 1, args.end(),
                           [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
    };
    std::vector<std::string> extra;
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
        if (item.name == "++" || item.name == "--") {
            continue;  // section enter/leave markers
        }
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub->get_name())) {
            continue;
        }
        std::string name = item.name;
        std::replace(name.begin(), name.end(), '_', '-');
        const std::string flag = "--" + name;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr || name == "config" || name == "help") {
            throw CLI::ConfigError("unknown key '" + item.name + "' in " + path);
        }
        if (given(flag)) {
            continue;
        }
        if (opt->get_expected_min() == 0) {
            if (item.inputs.size() == 1 && truthy(item.inputs[0])) {
                extra.push_back(flag);
            }
            continue;
        }
        extra.push_back(flag);
        extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Longhand-division demonstrations, environment-forced evaluation and error analysis.", "teachdemo"};
    app.require_subcommand(1);
    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Log progress and debug detail to stderr");
    app.add_flag("-q,--quiet", quiet, "Log errors only");

    std::string config_path;  // consumed by expand_config
    auto add_config = [&config_path](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value file mirroring the long flags; flags win on conflict");
    };

    BuildArgs build;
    CLI::App* b = app.add_subcommand("build-datasets", "Sample splits and write training files per variant");
    add_config(b);
    b->add_option("--data-dir", build.data_dir,
                  "Mathematics Dataset root with train-easy/ train-medium/ train-hard/ interpolate/ "
                  "(default: $TEACH_DEMO_DATA_DIR)");
    b->add_flag("--synthetic", build.synthetic, "Synthesize question pools instead of reading files");
    b->add_option("--per-pool", build.per_pool, "Questions per synthesized pool")->capture_default_str();
    b->add_option("--seed", build.seed, "Seed for sampling and synthesis")->capture_default_str();
    b->add_option("--variant", build.variant, "full, writelook, writeonly, answer or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"all", "full", "writelook", "writeonly", "answer"}));
    b->add_option("--marker", build.marker, "End-of-document marker between records")->capture_default_str();
    b->add_option("--out", build.out, "Output directory")->capture_default_str();

    DemoArgs demo;
    auto add_problem = [](CLI::App* sub, DemoArgs& d, bool required) {
        auto* x = sub->add_option("--dividend", d.dividend, "Dividend, 0..99999999");
        auto* y = sub->add_option("--divisor", d.divisor, "Divisor, 1..99999999");
        if (required) {
            x->required();
            y->required();
        }
        sub->add_option("--variant", d.variant, "full, writelook, writeonly or answer")
            ->capture_default_str()
            ->check(CLI::IsMember({"full", "writelook", "writeonly", "answer"}));
        sub->add_option("--question", d.question, "Question template: whatis or calculate")
            ->capture_default_str()
            ->check(CLI::IsMember({"whatis", "calculate"}));
        sub->add_option("--glyph", d.glyph, "Division glyph written after the divisor")->capture_default_str();
    };
    CLI::App* d = app.add_subcommand("demo", "Print the training record for one problem");
    add_config(d);
    add_problem(d, demo, true);

    DemoArgs dump;
    CLI::App* du = app.add_subcommand("dump", "Print the final grid of a demonstration, one line per row");
    add_config(du);
    add_problem(du, dump, true);

    VerifyArgs verify;
    CLI::App* v = app.add_subcommand("verify", "Replay demonstrations and check looks and the final answer");
    add_config(v);
    add_problem(v, verify.demo, false);
    v->add_option("--file", verify.file, "Training file to verify record by record ('-' for stdin)");
    v->add_option("--marker", verify.marker, "End-of-document marker between records")->capture_default_str();

    EvalArgs eval;
    CLI::App* e = app.add_subcommand("evaluate", "Run forced sessions over a question file");
    add_config(e);
    e->add_option("--generator", eval.generator, "oracle, noise:P[:looks|:digits] or remote:ADDR")
        ->capture_default_str();
    e->add_option("--questions", eval.questions, "Question file (answer lines are ignored)")
        ->required()
        ->check(CLI::ExistingFile);
    e->add_option("--jobs", eval.jobs, "Sessions run in parallel")->capture_default_str();
    e->add_option("--seed", eval.seed, "Seed for noise generators")->capture_default_str();
    e->add_option("--out", eval.out, "Directory for session logs, summary.json and report.csv")
        ->capture_default_str();
    e->add_option("--variant", eval.variant, "Variant label recorded in the report")->capture_default_str();
    e->add_option("--test-set", eval.test_set, "Test-set label (default: questions file stem)");
    e->add_option("--limit", eval.limit, "Evaluate only the first N questions (0 = all)")->capture_default_str();
    e->add_option("--timeout-ms", eval.timeout_ms, "Remote generator I/O timeout")->capture_default_str();
    e->add_option("--trim-tokens", eval.session.trim_tokens, "Tokens dropped from the prefix per extra round")
        ->capture_default_str();
    e->add_option("--max-rounds", eval.session.max_rounds, "Generation rounds per session")->capture_default_str();
    e->add_option("--max-new-tokens", eval.session.max_new_tokens, "Tokens requested per generation")
        ->capture_default_str();
    e->add_option("--forcing", eval.forcing, "lazy or eager")
        ->capture_default_str()
        ->check(CLI::IsMember({"lazy", "eager"}));
    e->add_option("--malformed", eval.malformed, "skip or abort")
        ->capture_default_str()
        ->check(CLI::IsMember({"skip", "abort"}));

    std::string sessions;
    std::string classify_variant = "full";
    CLI::App* c = app.add_subcommand("classify", "Assign a first-error category to each incorrect session");
    add_config(c);
    c->add_option("--sessions", sessions, "Directory of session logs")->required();
    c->add_option("--variant", classify_variant, "Variant label")->capture_default_str();

    std::vector<std::string> report_in;
    std::string report_format = "text";
    std::string sweep;
    CLI::App* r = app.add_subcommand("report", "Render accuracy and error tables from evaluation summaries");
    add_config(r);
    r->add_option("--in", report_in, "summary.json files")->check(CLI::ExistingFile);
    r->add_option("--format", report_format, "text or csv")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "csv"}));
    r->add_option("--sweep", sweep, "CSV of variant,steps,correct validation scores")->check(CLI::ExistingFile);

    std::string listen;
    std::string serve_generator = "oracle";
    std::uint64_t serve_seed = 0;
    bool serial = false;
    CLI::App* s = app.add_subcommand("serve-oracle", "Serve a built-in generator over the wire protocol");
    add_config(s);
    s->add_option("--listen", listen, "stdio or tcp://host:port (port 0 picks one)")->required();
    s->add_option("--generator", serve_generator, "oracle or noise:P[:looks|:digits]")->capture_default_str();
    s->add_option("--seed", serve_seed, "Seed for noise generators")->capture_default_str();
    s->add_flag("--serial", serial, "Serve one connection at a time");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    setup_logging(verbose, quiet);

    try {
        if (b->parsed()) return cmd_build(build);
        if (d->parsed()) return cmd_demo(demo);
        if (du->parsed()) return cmd_dump(dump);
        if (v->parsed()) {
            verify.from_problem = verify.file.empty() && (v->count("--dividend") > 0 || v->count("--divisor") > 0);
            if (verify.file.empty() && !verify.from_problem && v->count("--dividend") == 0) {
                verify.file = "-";
            }
            return cmd_verify(verify);
        }
        if (e->parsed()) return cmd_evaluate(eval);
        if (c->parsed()) return cmd_classify(sessions, classify_variant);
        if (r->parsed()) return cmd_report(report_in, report_format, sweep);
        if (s->parsed()) return cmd_serve(listen, serve_generator, serve_seed, serial);
    } catch (const UsageError& err) {
        std::cerr << "teachdemo: " << err.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "teachdemo: " << err.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace teachdemo
