#include "doctest.h"

#include <algorithm>

#include "support.hpp"
#include "teachdemo/errors.hpp"
#include "teachdemo/report.hpp"

using namespace teachdemo;

namespace {

EvalReport make_report(const std::string& variant, const std::string& test_set, int total, int correct) {
    EvalReport r;
    r.variant = variant;
    r.test_set = test_set;
    for (int i = 0; i < total; ++i) {
        EvalRow row;
        row.dividend = 100 + i;
        row.divisor = 7;
        row.question = render_question({row.dividend, row.divisor});
        row.variant = variant;
        row.correct = i < correct;
        row.status = SessionStatus::Answered;
        row.answer = row.correct ? row.dividend % 7 : row.dividend % 7 + 1;
        if (!row.correct) {
            row.category = kAllCategories[static_cast<std::size_t>(i) % kAllCategories.size()];
        }
        row.rounds = 1;
        r.rows.push_back(row);
    }
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.below(i)]);
    }
}

bool has_line_with(const std::string& text, std::initializer_list<const char*> parts) {
    for (const std::string& l : lines_of(text)) {
        if (std::all_of(parts.begin(), parts.end(), [&](const char* p) { return l.find(p) != std::string::npos; })) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("accuracy table has variants as rows and test sets as columns") {
    std::vector<EvalReport> reports;
    const char* variants[] = {"answer", "writeonly", "full", "writelook"};
    for (int v = 0; v < 4; ++v) {
        reports.push_back(make_report(variants[v], "mixed", 20, 5 * v));
        reports.push_back(make_report(variants[v], "interpolated", 20, 20 - v));
    }
    const std::string text = render_report(reports, ReportFormat::Text);
    const auto lines = lines_of(text);
    REQUIRE(lines.size() > 6);
    CHECK(lines[1].find("interpolated") < lines[1].find("mixed"));
    CHECK(lines[2].starts_with("full"));
    CHECK(lines[3].starts_with("writelook"));
    CHECK(lines[4].starts_with("writeonly"));
    CHECK(lines[5].starts_with("answer"));
    CHECK(lines[6].empty());
    CHECK(has_line_with(text, {"answer", "100.0 (20/20)", "0.0 (0/20)"}));
    CHECK(has_line_with(text, {"full", "90.0 (18/20)", "50.0 (10/20)"}));
    CHECK(text.find("First errors") != std::string::npos);
}

TEST_CASE("rendering does not depend on report or row order") {
    std::vector<EvalReport> reports{make_report("full", "mixed", 30, 11), make_report("answer", "mixed", 30, 3),
                                    make_report("full", "interpolated", 30, 29)};
    const std::string text = render_report(reports, ReportFormat::Text);
    const std::string csv = render_report(reports, ReportFormat::Csv);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        auto shuffled = reports;
        shuffle_in_place(shuffled, rng);
        for (EvalReport& r : shuffled) {
            shuffle_in_place(r.rows, rng);
        }
        REQUIRE(render_report(shuffled, ReportFormat::Text) == text);
        REQUIRE(render_report(shuffled, ReportFormat::Csv) == csv);
    }
}

TEST_CASE("a single result renders a one-cell table") {
    const std::string text = render_report({make_report("full", "mixed", 1, 1)}, ReportFormat::Text);
    const auto lines = lines_of(text);
    REQUIRE(lines.size() >= 3);
    CHECK(lines[1].find("mixed") != std::string::npos);
    CHECK(lines[2].find("100.0 (1/1)") != std::string::npos);
    CHECK(lines[3].empty());
}

TEST_CASE("category counts cover every incorrect row") {
    const EvalReport r = make_report("full", "mixed", 25, 7);
    std::size_t total = 0;
    for (const auto& [cat, n] : r.category_counts()) {
        total += n;
    }
    CHECK(total == 18);
    CHECK(r.correct() == 7);
    CHECK(r.accuracy() == doctest::Approx(0.28));
}

TEST_CASE("checkpoint selection prefers fewer steps on ties") {
    const auto picked = select_checkpoints({{"full", 13000, 86}, {"full", 10000, 86}, {"full", 7000, 80},
                                            {"answer", 1000, 10}, {"answer", 2000, 12}});
    CHECK(picked.at("full").steps == 10000);
    CHECK(picked.at("full").correct == 86);
    CHECK(picked.at("answer").steps == 2000);
}

TEST_CASE("sweep CSV and sweep table") {
    const auto sweep = parse_sweep_csv("variant,steps,correct\nfull,10000,86\r\nfull,13000,86\n\nfull,7000,80\n");
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[2].steps == 7000);
    CHECK_THROWS_AS(parse_sweep_csv("full,ten,86\n"), Error);
    CHECK_THROWS_AS(parse_sweep_csv("full,10\n"), Error);

    const std::string text = render_report({}, ReportFormat::Text, sweep);
    CHECK(has_line_with(text, {"full", "80", "86*", "10000"}));
    CHECK(text.find("86*") < text.find(" 86 "));
}

TEST_CASE("CSV export has the fixed header and quotes awkward fields") {
    EvalReport r = make_report("full", "mixed", 2, 1);
    r.rows[0].question = "say \"hi\", then divide";
    const auto lines = lines_of(render_report({r}, ReportFormat::Csv));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == kCsvHeader);
    bool quoted = false;
    for (const std::string& l : lines) {
        quoted = quoted || l.starts_with("\"say \"\"hi\"\", then divide\",100,7,full,answered,2,true,,0,1");
    }
    CHECK(quoted);
    CHECK(std::find_if(lines.begin(), lines.end(), [](const std::string& l) {
              return l.find(",false,final-transcription,") != std::string::npos;
          }) == lines.end());
    CHECK(std::find_if(lines.begin(), lines.end(), [](const std::string& l) {
              return l.find(",false,inter-area-copy,") != std::string::npos;
          }) != lines.end());
}

TEST_CASE("summary JSON round-trips") {
    EvalReport r = make_report("writelook", "interpolated", 9, 4);
    r.config = {{"generator", "oracle"}, {"seed", "7"}};
    r.rows[8].status = SessionStatus::Unterminated;
    r.rows[8].answer.reset();
    r.rows[2].forcing_events = 3;
    const EvalReport back = report_from_json(report_to_json(r));
    CHECK(back.variant == r.variant);
    CHECK(back.test_set == r.test_set);
    CHECK(back.config == r.config);
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(back.rows[i].question == r.rows[i].question);
        CHECK(back.rows[i].status == r.rows[i].status);
        CHECK(back.rows[i].answer == r.rows[i].answer);
        CHECK(back.rows[i].correct == r.rows[i].correct);
        CHECK(back.rows[i].category == r.rows[i].category);
        CHECK(back.rows[i].forcing_events == r.rows[i].forcing_events);
    }
    CHECK_THROWS_AS(report_from_json("{\"rows\": 3}"), Error);
    CHECK_THROWS_AS(report_from_json("not json"), Error);
}

TEST_CASE("build_report classifies incorrect sessions") {
    std::vector<SessionResult> sessions(2);
    sessions[0].problem = {1862, 16};
    sessions[0].status = SessionStatus::Answered;
    sessions[0].answer = 6;
    sessions[0].correct = true;
    sessions[1].problem = {1862, 16};
    sessions[1].status = SessionStatus::Answered;
    sessions[1].answer = 7;
    sessions[1].transcript = testsupport::golden_actions();
    const std::size_t at = sessions[1].transcript.rfind("is 6 }");
    sessions[1].transcript.replace(at, 6, "is 7 }");
    const EvalReport r = build_report(sessions, "full", "mixed");
    REQUIRE(r.rows.size() == 2);
    CHECK_FALSE(r.rows[0].category);
    CHECK(r.rows[1].category == ErrorCategory::FinalTranscription);
    CHECK(r.rows[1].question == render_question({1862, 16}));
}
