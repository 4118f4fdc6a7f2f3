#include "teachdemo/report.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"

#include "teachdemo/errors.hpp"

namespace teachdemo {

double EvalReport::accuracy() const {
    std::vector<bool> c;
    c.reserve(rows.size());
    for (const EvalRow& r : rows) {
        c.push_back(r.correct);
    }
    return score(c);
}

std::size_t EvalReport::correct() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const EvalRow& r) { return r.correct; }));
}

std::map<ErrorCategory, std::size_t> EvalReport::category_counts() const {
    std::map<ErrorCategory, std::size_t> out;
    for (ErrorCategory c : kAllCategories) {
        out[c] = 0;
    }
    for (const EvalRow& r : rows) {
        if (r.category) {
            ++out[*r.category];
        }
    }
    return out;
}

namespace {

ErrorCategory classify_or_other(const Problem& p, const std::string& transcript) {
    try {
        return classify_error(p, transcript).category;
    } catch (const OracleUnavailable&) {
        return ErrorCategory::Other;
    }
}

EvalRow row_for(const Problem& p, const std::string& variant, SessionStatus status,
                std::optional<std::int64_t> answer, bool correct, int events, int rounds,
                const std::string& transcript) {
    EvalRow row;
    row.question = render_question(p);
    row.dividend = p.dividend;
    row.divisor = p.divisor;
    row.variant = variant;
    row.status = status;
    row.answer = answer;
    row.correct = correct;
    if (!correct) {
        row.category = classify_or_other(p, transcript);
    }
    row.forcing_events = events;
    row.rounds = rounds;
    return row;
}

// Known variants first in a fixed order, anything else alphabetically after.
int variant_rank(const std::string& v) {
    static const std::vector<std::string> kOrder{"full", "writelook", "writeonly", "answer"};
    const auto it = std::find(kOrder.begin(), kOrder.end(), v);
    return it == kOrder.end() ? static_cast<int>(kOrder.size()) : static_cast<int>(it - kOrder.begin());
}

bool variant_less(const std::string& a, const std::string& b) {
    const int ra = variant_rank(a);
    const int rb = variant_rank(b);
    return ra != rb ? ra < rb : a < b;
}

std::vector<std::string> ordered_variants(std::set<std::string> names) {
    std::vector<std::string> v(names.begin(), names.end());
    std::sort(v.begin(), v.end(), variant_less);
    return v;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string csv_line(const EvalRow& r) {
    std::ostringstream out;
    out << csv_field(r.question) << ',' << r.dividend << ',' << r.divisor << ',' << csv_field(r.variant) << ','
        << to_string(r.status) << ',' << (r.answer ? std::to_string(*r.answer) : std::string()) << ','
        << (r.correct ? "true" : "false") << ',' << (r.category ? to_string(*r.category) : "") << ','
        << r.forcing_events << ',' << r.rounds;
    return out.str();
}

std::string percent(std::size_t correct, std::size_t total) {
    std::ostringstream out;
    const double pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
    out << std::fixed << std::setprecision(1) << pct << " (" << correct << "/" << total << ")";
    return out.str();
}

// Left-aligned columns, two spaces apart.
std::string render_table(const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            width[i] = std::max(width[i], row[i].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) {
                line += std::string(width[i] - row[i].size() + 2, ' ');
            }
        }
        out << line << '\n';
    }
    return out.str();
}

struct Cell {
    std::size_t correct = 0;
    std::size_t total = 0;
    std::map<ErrorCategory, std::size_t> categories;
};

}  // namespace

EvalReport build_report(const std::vector<SessionResult>& sessions, std::string variant, std::string test_set,
                        std::map<std::string, std::string> config) {
    EvalReport report{std::move(variant), std::move(test_set), std::move(config), {}};
    for (const SessionResult& s : sessions) {
        report.rows.push_back(row_for(s.problem, report.variant, s.status, s.answer, s.correct,
                                      static_cast<int>(s.forcing_events.size()), s.rounds_used, s.transcript));
    }
    return report;
}

EvalReport build_report(const std::vector<LoggedSession>& sessions, std::string variant, std::string test_set,
                        std::map<std::string, std::string> config) {
    EvalReport report{std::move(variant), std::move(test_set), std::move(config), {}};
    for (const LoggedSession& s : sessions) {
        report.rows.push_back(
            row_for(s.problem, report.variant, s.status, s.answer, s.correct, s.forcing_events, s.rounds, s.transcript));
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const EvalRow& r : report.rows) {
        rows.push_back({{"question", r.question},
                        {"dividend", r.dividend},
                        {"divisor", r.divisor},
                        {"variant", r.variant},
                        {"status", to_string(r.status)},
                        {"answer", r.answer ? nlohmann::json(*r.answer) : nlohmann::json(nullptr)},
                        {"correct", r.correct},
                        {"category", r.category ? nlohmann::json(to_string(*r.category)) : nlohmann::json(nullptr)},
                        {"forcing_events", r.forcing_events},
                        {"rounds", r.rounds}});
    }
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [c, n] : report.category_counts()) {
        counts[to_string(c)] = n;
    }
    const nlohmann::json j{{"variant", report.variant},
                           {"test_set", report.test_set},
                           {"accuracy", report.accuracy()},
                           {"correct", report.correct()},
                           {"total", report.rows.size()},
                           {"categories", counts},
                           {"config", report.config},
                           {"rows", rows}};
    return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
    const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("rows")) {
        throw Error("not an evaluation summary");
    }
    try {
        EvalReport report;
        report.variant = j.at("variant").get<std::string>();
        report.test_set = j.at("test_set").get<std::string>();
        if (j.contains("config")) {
            report.config = j.at("config").get<std::map<std::string, std::string>>();
        }
        for (const nlohmann::json& r : j.at("rows")) {
            EvalRow row;
            row.question = r.at("question").get<std::string>();
            row.dividend = r.at("dividend").get<std::int64_t>();
            row.divisor = r.at("divisor").get<std::int64_t>();
            row.variant = r.at("variant").get<std::string>();
            row.status = parse_session_status(r.at("status").get<std::string>()).value_or(SessionStatus::Aborted);
            if (!r.at("answer").is_null()) {
                row.answer = r.at("answer").get<std::int64_t>();
            }
            row.correct = r.at("correct").get<bool>();
            if (!r.at("category").is_null()) {
                row.category = parse_error_category(r.at("category").get<std::string>());
            }
            row.forcing_events = r.at("forcing_events").get<int>();
            row.rounds = r.at("rounds").get<int>();
            report.rows.push_back(std::move(row));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed evaluation summary: ") + e.what());
    }
}

std::map<std::string, CheckpointScore> select_checkpoints(const std::vector<CheckpointScore>& sweep) {
    std::map<std::string, CheckpointScore> best;
    for (const CheckpointScore& s : sweep) {
        auto it = best.find(s.variant);
        if (it == best.end() || s.correct > it->second.correct ||
            (s.correct == it->second.correct && s.steps < it->second.steps)) {
            best[s.variant] = s;
        }
    }
    return best;
}

std::vector<CheckpointScore> parse_sweep_csv(std::string_view text) {
    std::vector<CheckpointScore> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || (line_no == 1 && line.starts_with("variant"))) {
            continue;
        }
        std::istringstream fields(line);
        std::string variant;
        std::string steps;
        std::string correct;
        if (!std::getline(fields, variant, ',') || !std::getline(fields, steps, ',') ||
            !std::getline(fields, correct, ',')) {
            throw Error("sweep line " + std::to_string(line_no) + ": expected variant,steps,correct");
        }
        try {
            out.push_back({variant, std::stoi(steps), std::stoi(correct)});
        } catch (const std::exception&) {
            throw Error("sweep line " + std::to_string(line_no) + ": steps and correct must be integers");
        }
    }
    return out;
}

std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format,
                          const std::vector<CheckpointScore>& sweep) {
    if (format == ReportFormat::Csv) {
        std::vector<std::pair<int, std::string>> lines;
        for (const EvalReport& r : reports) {
            for (const EvalRow& row : r.rows) {
                lines.emplace_back(variant_rank(row.variant), csv_line(row));
            }
        }
        std::sort(lines.begin(), lines.end());
        std::string out(kCsvHeader);
        out += '\n';
        for (const auto& [rank, line] : lines) {
            out += line;
            out += '\n';
        }
        return out;
    }

    std::map<std::pair<std::string, std::string>, Cell> cells;
    std::set<std::string> variants;
    std::set<std::string> test_sets;
    for (const EvalReport& r : reports) {
        Cell& c = cells[{r.variant, r.test_set}];
        c.total += r.rows.size();
        c.correct += r.correct();
        for (const auto& [cat, n] : r.category_counts()) {
            c.categories[cat] += n;
        }
        variants.insert(r.variant);
        test_sets.insert(r.test_set);
    }

    std::ostringstream out;
    if (!reports.empty()) {
        out << "Accuracy: percent of test questions answered correctly\n";
        std::vector<std::vector<std::string>> table{{"variant"}};
        for (const std::string& t : test_sets) {
            table[0].push_back(t);
        }
        for (const std::string& v : ordered_variants(variants)) {
            std::vector<std::string> row{v};
            for (const std::string& t : test_sets) {
                const auto it = cells.find({v, t});
                row.push_back(it == cells.end() ? "-" : percent(it->second.correct, it->second.total));
            }
            table.push_back(std::move(row));
        }
        out << render_table(table);

        out << "\nFirst errors of incorrect answers\n";
        std::vector<std::vector<std::string>> errors{{"variant", "test set"}};
        for (ErrorCategory c : kAllCategories) {
            errors[0].emplace_back(to_string(c));
        }
        errors[0].emplace_back("incorrect");
        for (const std::string& v : ordered_variants(variants)) {
            for (const std::string& t : test_sets) {
                const auto it = cells.find({v, t});
                if (it == cells.end()) {
                    continue;
                }
                std::vector<std::string> row{v, t};
                for (ErrorCategory c : kAllCategories) {
                    row.push_back(std::to_string(it->second.categories[c]));
                }
                row.push_back(std::to_string(it->second.total - it->second.correct));
                errors.push_back(std::move(row));
            }
        }
        out << render_table(errors);
    }

    if (!sweep.empty()) {
        if (!reports.empty()) {
            out << '\n';
        }
        out << "Validation questions answered correctly by training steps (* = selected)\n";
        std::set<int> steps;
        std::set<std::string> sweep_variants;
        std::map<std::pair<std::string, int>, int> score_at;
        for (const CheckpointScore& s : sweep) {
            steps.insert(s.steps);
            sweep_variants.insert(s.variant);
            score_at[{s.variant, s.steps}] = s.correct;
        }
        const auto chosen = select_checkpoints(sweep);
        std::vector<std::vector<std::string>> table{{"variant"}};
        for (int s : steps) {
            table[0].push_back(std::to_string(s));
        }
        table[0].emplace_back("selected");
        for (const std::string& v : ordered_variants(sweep_variants)) {
            std::vector<std::string> row{v};
            const CheckpointScore& pick = chosen.at(v);
            for (int s : steps) {
                const auto it = score_at.find({v, s});
                if (it == score_at.end()) {
                    row.emplace_back("-");
                } else {
                    row.push_back(std::to_string(it->second) + (s == pick.steps ? "*" : ""));
                }
            }
            row.push_back(std::to_string(pick.steps));
            table.push_back(std::move(row));
        }
        out << render_table(table);
    }
    return out.str();
}

}  // namespace teachdemo
