#include "teachdemo/evaluator.hpp"

#include <algorithm>
#include <map>

#include <spdlog/spdlog.h>

#include "teachdemo/actions.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/errors.hpp"
#include "teachdemo/rng.hpp"

namespace teachdemo {

const char* to_string(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::FinalTranscription: return "final-transcription";
        case ErrorCategory::InterAreaCopy: return "inter-area-copy";
        case ErrorCategory::InitialTranscription: return "initial-transcription";
        case ErrorCategory::Comparison: return "comparison";
        case ErrorCategory::Subtraction: return "subtraction";
        case ErrorCategory::Other: return "other";
    }
    return "?";
}

std::optional<ErrorCategory> parse_error_category(std::string_view s) noexcept {
    for (ErrorCategory c : kAllCategories) {
        if (s == to_string(c)) {
            return c;
        }
    }
    return std::nullopt;
}

double score(const std::vector<bool>& correct) {
    if (correct.empty()) {
        spdlog::warn("scoring an empty result list; accuracy defined as 0");
        return 0.0;
    }
    const auto n = std::count(correct.begin(), correct.end(), true);
    return static_cast<double>(n) / static_cast<double>(correct.size());
}

double score(const std::vector<SessionResult>& results) {
    std::vector<bool> correct;
    correct.reserve(results.size());
    for (const SessionResult& r : results) {
        correct.push_back(r.correct);
    }
    return score(correct);
}

namespace {

// Lower rank wins when one action breaks several rules.
int rank(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::InitialTranscription: return 0;
        case ErrorCategory::Comparison: return 1;
        case ErrorCategory::Subtraction: return 2;
        case ErrorCategory::InterAreaCopy: return 3;
        case ErrorCategory::FinalTranscription: return 4;
        case ErrorCategory::Other: return 5;
    }
    return 5;
}

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
int digit_or_zero(char c) noexcept { return is_digit(c) ? c - '0' : 0; }

std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') {
            ++i;
        }
        const std::size_t b = i;
        while (i < text.size() && text[i] != ' ') {
            ++i;
        }
        if (i > b) {
            out.emplace_back(text.substr(b, i - b));
        }
    }
    return out;
}

// Digits spelled one per word ("1 2") or contiguously ("12").
std::optional<std::int64_t> spelled_number(const std::vector<std::string>& w, std::size_t b, std::size_t e) {
    if (b >= e || e - b > 12) {
        return std::nullopt;
    }
    std::int64_t v = 0;
    int digits = 0;
    for (std::size_t i = b; i < e; ++i) {
        for (char c : w[i]) {
            if (!is_digit(c) || ++digits > 12) {
                return std::nullopt;
            }
            v = v * 10 + (c - '0');
        }
    }
    return v;
}

const char* relation_word(std::int64_t a, std::int64_t b) noexcept {
    if (b > a) return "larger";
    if (b < a) return "smaller";
    return "equal";
}

bool is_relation_word(const std::string& s) noexcept {
    return s == "larger" || s == "smaller" || s == "equal";
}

std::string digits_of(const std::vector<CellSymbol>& pairs) {
    std::string out;
    for (const CellSymbol& p : pairs) {
        if (is_digit(p.symbol)) {
            out += p.symbol;
        }
    }
    return out;
}

class Checker {
public:
    Checker(const Problem& p, const Write& layout) : problem_(p), layout_(layout), divisor_(std::to_string(p.divisor)) {}

    // Violations of `action`, the index-th action of the transcript.
    std::vector<std::pair<ErrorCategory, std::string>> step(std::size_t index, const Action& action) {
        found_.clear();
        if (index == 0) {
            check_layout(action);
        }
        if (const auto* w = std::get_if<Write>(&action)) {
            on_write(*w, index == 0);
        } else if (const auto* l = std::get_if<Look>(&action)) {
            on_look(*l);
        } else if (std::holds_alternative<Clear>(action)) {
            grid_.clear_scratch();
            reset_compare();
            bring_down_.reset();
            prev_was_look_ = false;
        } else {
            on_note(std::get<NoOp>(action).text);
            prev_was_look_ = false;
        }
        return found_;
    }

private:
    void flag(ErrorCategory c, std::string why) { found_.emplace_back(c, std::move(why)); }

    void reset_compare() noexcept {
        compare_stage_ = 0;
        in_compare_ = false;
    }

    void check_layout(const Action& action) {
        const auto* w = std::get_if<Write>(&action);
        if (!w || w->pairs.size() != layout_.pairs.size()) {
            flag(ErrorCategory::InitialTranscription, "first action is not the problem layout");
            return;
        }
        for (std::size_t i = 0; i < w->pairs.size(); ++i) {
            const CellSymbol& got = w->pairs[i];
            const CellSymbol& want = layout_.pairs[i];
            const bool glyph_slot = !is_word_char(want.symbol);
            if (got.at.coord != want.at.coord ||
                (glyph_slot ? is_word_char(got.symbol) || got.symbol == kEmptySymbol : got.symbol != want.symbol)) {
                flag(ErrorCategory::InitialTranscription,
                     "layout differs from the question at " + format_coord(want.at.coord));
                return;
            }
        }
    }

    void on_write(const Write& w, bool is_layout) {
        reset_compare();
        prev_was_look_ = false;
        if (is_layout) {
            apply(w);
            return;
        }
        const bool only_minus = w.pairs.size() == 1 && w.pairs[0].symbol == '-';
        if (expect_) {
            if (w.pairs.front().symbol != expect_->symbol) {
                flag(expect_->category, std::string("wrote '") + w.pairs.front().symbol + "' where the preceding step gives '" +
                                            expect_->symbol + "'");
            }
            expect_.reset();
        }
        if (copy_) {
            if (digits_of(w.pairs) != *copy_) {
                flag(ErrorCategory::InterAreaCopy, "subtrahend copy '" + digits_of(w.pairs) + "' differs from total '" + *copy_ + "'");
            }
            copy_.reset();
        }
        if (bring_down_ && !(w.pairs.size() == 1 && w.pairs[0].at.coord.y == 1)) {
            if (w.pairs.size() != 1 || w.pairs[0].symbol != *bring_down_) {
                flag(ErrorCategory::InterAreaCopy, std::string("brought down '") + w.pairs[0].symbol + "' for '" +
                                                       *bring_down_ + "'");
            }
            bring_down_.reset();
        }
        for (const CellSymbol& p : w.pairs) {
            if (p.symbol == '+') {
                std::vector<CellSymbol> row;
                for (const CellSymbol& q : w.pairs) {
                    if (q.at.coord.y == p.at.coord.y && q.at.coord.x > p.at.coord.x) {
                        row.push_back(q);
                    }
                }
                std::sort(row.begin(), row.end(),
                          [](const CellSymbol& a, const CellSymbol& b) { return a.at.coord.x < b.at.coord.x; });
                if (digits_of(row) != divisor_) {
                    flag(ErrorCategory::InterAreaCopy, "addend '" + digits_of(row) + "' differs from divisor " + divisor_);
                }
            } else if (p.at.coord.y == 1 && p.at.coord.x < kScratchFirstColumn && p.symbol != '0') {
                if (!increment_ || p.symbol != *increment_) {
                    flag(ErrorCategory::Other, std::string("quotient digit '") + p.symbol + "' not justified by an increment");
                }
            } else if (p.symbol == kEmptySymbol) {
                const char before = grid_.read(p.at.coord);
                if (before != kEmptySymbol && before != '0') {
                    flag(ErrorCategory::Subtraction, std::string("erased '") + before + "' at " + format_coord(p.at.coord));
                }
            }
        }
        increment_.reset();
        if (only_minus) {
            copy_ = digits_of(last_look_);
            subtracting_ = true;
        }
        apply(w);
    }

    void apply(const Write& w) {
        for (const CellSymbol& p : w.pairs) {
            grid_.write(p.at.coord, p.symbol);
        }
    }

    void on_look(const Look& l) {
        for (const CellSymbol& p : l.pairs) {
            if (grid_.read(p.at.coord) != p.symbol) {
                flag(ErrorCategory::Other, "look at " + format_coord(p.at.coord) + " reports '" + p.symbol +
                                               "' but the cell holds '" + grid_.read(p.at.coord) + "'");
                break;
            }
        }
        expect_.reset();
        prev_look_ = last_look_;
        last_look_ = l.pairs;
        prev_was_look_ = true;
        if (compare_stage_ == 1) {
            look_a_ = l.pairs;
            compare_stage_ = 2;
        } else if (compare_stage_ == 3) {
            look_b_ = l.pairs;
            compare_stage_ = 4;
        }
        if (answer_stage_ == 1) {
            remainder_read_ = digits_of(l.pairs);
            answer_stage_ = 2;
        } else if (answer_stage_ == 2) {
            if (l.pairs.size() == 1 && is_digit(l.pairs[0].symbol)) {
                bring_down_ = l.pairs[0].symbol;
            }
            answer_stage_ = 3;
        }
    }

    void on_note(const std::string& text) {
        const std::vector<std::string> w = words_of(text);
        if (w.empty()) {
            return;
        }
        if (w.size() == 1 && w[0] == "compare") {
            expect_.reset();
            in_compare_ = true;
            compare_stage_ = 1;
            subtracting_ = false;
            return;
        }
        if (text == "read the answer") {
            answer_stage_ = 1;
            subtracting_ = false;
            borrowing_ = false;
            reset_compare();
            return;
        }
        if (text.starts_with("final remainder is")) {
            const std::optional<std::int64_t> v = parse_final_remainder(text);
            std::optional<std::int64_t> read;
            if (answer_stage_ >= 2 && !remainder_read_.empty()) {
                read = std::stoll(remainder_read_);
            }
            const std::int64_t want = read.value_or(problem_.remainder());
            if (!v || *v != want) {
                flag(ErrorCategory::FinalTranscription, "final answer " + (v ? std::to_string(*v) : std::string("?")) +
                                                            " but the remainder read is " + std::to_string(want));
            }
            return;
        }
        if (w.size() == 2 && w[1] == "digits") {
            if (compare_stage_ == 2) {
                if (w[0] != std::to_string(digits_of(look_a_).size())) {
                    flag(ErrorCategory::Comparison, "digit count '" + w[0] + "' for '" + digits_of(look_a_) + "'");
                }
                compare_stage_ = 3;
            }
            return;
        }
        if (w.size() == 3 && w[1] == "digits" && is_relation_word(w[2])) {
            if (compare_stage_ == 4) {
                const auto na = static_cast<std::int64_t>(digits_of(look_a_).size());
                const auto nb = static_cast<std::int64_t>(digits_of(look_b_).size());
                if (w[0] != std::to_string(nb) || w[2] != relation_word(na, nb)) {
                    flag(ErrorCategory::Comparison, "'" + text + "' for " + std::to_string(na) + " vs " + std::to_string(nb) + " digits");
                }
                compare_stage_ = 5;
            }
            return;
        }
        if (w.size() == 4 && w[1] == "," && is_relation_word(w[3])) {
            verdict(w, text);
            return;
        }
        if (text == "borrow a 1") {
            if (!last_sub_ || last_sub_->second <= last_sub_->first) {
                flag(ErrorCategory::Subtraction, "borrow without a larger subtrahend digit");
            }
            borrowing_ = true;
            return;
        }
        if (text == "change 0 to 9") {
            if (last_look_.size() != 1 || last_look_[0].symbol != '0') {
                flag(ErrorCategory::Subtraction, "'change 0 to 9' on a non-zero cell");
            }
            expect_ = Expect{'9', ErrorCategory::Subtraction};
            return;
        }
        if (text == "carry the 1") {
            return;
        }
        arithmetic(w, text);
    }

    void verdict(const std::vector<std::string>& w, const std::string& text) {
        const ErrorCategory cat = in_compare_ ? ErrorCategory::Comparison : ErrorCategory::Subtraction;
        const auto a = spelled_number(w, 0, 1);
        const auto b = spelled_number(w, 2, 3);
        if (!a || !b) {
            flag(cat, "unreadable verdict '" + text + "'");
            return;
        }
        if (w[3] != relation_word(*a, *b)) {
            flag(cat, "verdict '" + text + "' is wrong");
        }
        if (prev_look_.size() == 1 && last_look_.size() == 1) {
            const int la = digit_or_zero(prev_look_[0].symbol);
            const int lb = digit_or_zero(last_look_[0].symbol);
            if (la != *a || lb != *b) {
                flag(cat, "verdict '" + text + "' does not use the looked digits");
            }
        }
        if (!in_compare_) {
            last_sub_ = std::make_pair(*a, *b);
        }
    }

    void arithmetic(const std::vector<std::string>& w, const std::string& text) {
        const auto eq = std::find(w.begin(), w.end(), "=");
        if (eq == w.end()) {
            return;
        }
        const std::size_t e = static_cast<std::size_t>(eq - w.begin());
        std::size_t op = e;
        for (std::size_t i = 0; i < e; ++i) {
            if (w[i] == "+" || w[i] == "-") {
                op = i;
                break;
            }
        }
        if (op == e) {
            return;
        }
        const bool minus = w[op] == "-";
        const ErrorCategory cat = minus ? ErrorCategory::Subtraction : ErrorCategory::Other;
        bool increment = false;
        auto operand = [&](std::size_t b, std::size_t end) -> std::optional<std::int64_t> {
            RunCoord rc;
            if (end - b == 2 && parse_run_coord(w[b], rc) && w[b + 1].size() == 1) {
                const char sym = w[b + 1][0];
                if (grid_.read(rc.coord) != sym) {
                    flag(ErrorCategory::Other, "'" + text + "' misreads " + format_coord(rc.coord));
                }
                if (rc.coord.y == 1 && rc.coord.x < kScratchFirstColumn) {
                    increment = true;
                }
                return digit_or_zero(sym);
            }
            return spelled_number(w, b, end);
        };
        const auto x = operand(0, op);
        const auto y = operand(op + 1, e);
        const auto z = spelled_number(w, e + 1, w.size());
        if (!x || !y || !z) {
            flag(cat, "unreadable arithmetic '" + text + "'");
            return;
        }
        const std::int64_t want = minus ? *x - *y : *x + *y;
        if (*z != want) {
            flag(cat, "'" + text + "' should give " + std::to_string(want));
        }
        if (increment) {
            increment_ = static_cast<char>('0' + *z % 10);
            return;
        }
        if (!minus) {
            expect_ = Expect{static_cast<char>('0' + *z % 10), ErrorCategory::Other};
            return;
        }
        if (borrowing_ && prev_was_look_) {
            // Decrement of a lender digit.
            if (last_look_.size() != 1 || digit_or_zero(last_look_[0].symbol) != *x || *y != 1) {
                flag(ErrorCategory::Subtraction, "'" + text + "' does not decrement the looked digit");
            }
        } else {
            if (last_sub_) {
                const std::int64_t minuend = last_sub_->first + (borrowing_ ? 10 : 0);
                if (*x != minuend || *y != last_sub_->second) {
                    flag(ErrorCategory::Subtraction, "'" + text + "' does not match the compared digits");
                }
            }
            borrowing_ = false;
        }
        if (*z >= 0 && *z <= 9) {
            expect_ = Expect{static_cast<char>('0' + *z), ErrorCategory::Subtraction};
        }
    }

    struct Expect {
        char symbol;
        ErrorCategory category;
    };

    Problem problem_;
    Write layout_;
    std::string divisor_;
    Grid grid_;
    std::vector<std::pair<ErrorCategory, std::string>> found_;

    std::vector<CellSymbol> prev_look_;
    std::vector<CellSymbol> last_look_;
    bool prev_was_look_ = false;

    bool in_compare_ = false;
    int compare_stage_ = 0;  // 1 after "compare", 2 after look A, 3 after "N digits", 4 after look B
    std::vector<CellSymbol> look_a_;
    std::vector<CellSymbol> look_b_;

    std::optional<Expect> expect_;
    std::optional<char> increment_;
    std::optional<std::string> copy_;
    bool subtracting_ = false;
    bool borrowing_ = false;
    std::optional<std::pair<std::int64_t, std::int64_t>> last_sub_;

    int answer_stage_ = 0;  // 1 after "read the answer", 2 after the remainder look, 3 after the source look
    std::string remainder_read_;
    std::optional<char> bring_down_;
};

Write reference_layout(const Problem& problem) {
    try {
        const Demonstration d = demonstrate(problem, Variant::Full);
        return std::get<Write>(d.actions.front());
    } catch (const std::exception& e) {
        throw OracleUnavailable(std::string("no reference demonstration: ") + e.what());
    }
}

}  // namespace

Classification classify_error(const Problem& problem, std::string_view transcript) {
    if (!is_valid(problem)) {
        throw OracleUnavailable("problem outside the supported operand range");
    }
    Checker checker(problem, reference_layout(problem));
    const std::vector<Token> tokens = lex(transcript);
    const ParseResult pr = parse_actions(tokens, ParseMode::Tolerant, true);
    Classification out;
    if (pr.actions.empty()) {
        out.category = ErrorCategory::InitialTranscription;
        out.detail = "no actions";
        return out;
    }
    for (std::size_t i = 0; i < pr.actions.size(); ++i) {
        auto found = checker.step(i, pr.actions[i]);
        if (found.empty()) {
            continue;
        }
        const auto best = std::min_element(found.begin(), found.end(),
                                           [](const auto& a, const auto& b) { return rank(a.first) < rank(b.first); });
        out.category = best->first;
        out.detail = best->second;
        out.action_index = i;
        out.offset = tokens[pr.spans[i].begin].offset;
        return out;
    }
    out.category = ErrorCategory::Other;
    out.detail = extract_answer(transcript) ? "no step violation found" : "no final answer";
    return out;
}

// ---------------------------------------------------------------------------
// Mutation corpus
// ---------------------------------------------------------------------------

namespace {

char other_digit(char d, Rng& rng) {
    return static_cast<char>('0' + (d - '0' + 1 + static_cast<int>(rng.below(9))) % 10);
}

const char* other_relation(const std::string& word, Rng& rng) {
    static constexpr const char* kWords[] = {"larger", "smaller", "equal"};
    std::vector<const char*> choices;
    for (const char* c : kWords) {
        if (word != c) {
            choices.push_back(c);
        }
    }
    return choices[rng.below(choices.size())];
}

// Replaces one digit word after the last "=" in a note.
bool mutate_result(NoOp& n, Rng& rng) {
    std::vector<std::string> w = words_of(n.text);
    const auto eq = std::find(w.rbegin(), w.rend(), "=");
    if (eq == w.rend()) {
        return false;
    }
    const std::size_t first = static_cast<std::size_t>(w.rend() - eq);
    std::vector<std::size_t> digits;
    for (std::size_t i = first; i < w.size(); ++i) {
        if (w[i].size() == 1 && is_digit(w[i][0])) {
            digits.push_back(i);
        }
    }
    if (digits.empty()) {
        return false;
    }
    std::string& d = w[digits[rng.below(digits.size())]];
    d[0] = other_digit(d[0], rng);
    n.text.clear();
    for (const std::string& s : w) {
        n.text += n.text.empty() ? s : " " + s;
    }
    return true;
}

bool mutate_write_digit(Write& wr, Rng& rng) {
    std::vector<std::size_t> digits;
    for (std::size_t i = 0; i < wr.pairs.size(); ++i) {
        if (is_digit(wr.pairs[i].symbol)) {
            digits.push_back(i);
        }
    }
    if (digits.empty()) {
        return false;
    }
    char& c = wr.pairs[digits[rng.below(digits.size())]].symbol;
    c = other_digit(c, rng);
    return true;
}

struct Site {
    std::size_t index;
    int kind;
};

// Edit sites of a canonical action list, grouped by the category an edit
// there should be classified as.
std::map<ErrorCategory, std::vector<Site>> find_sites(const std::vector<Action>& a) {
    std::map<ErrorCategory, std::vector<Site>> sites;
    bool in_compare = false;
    bool after_minus = false;
    int answer_stage = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (const auto* n = std::get_if<NoOp>(&a[i])) {
            const std::vector<std::string> w = words_of(n->text);
            if (n->text == "compare") {
                in_compare = true;
            } else if (n->text == "read the answer") {
                answer_stage = 1;
            } else if (n->text.starts_with("final remainder is")) {
                sites[ErrorCategory::FinalTranscription].push_back({i, 0});
            } else if (w.size() >= 2 && w[1] == "digits" && in_compare) {
                sites[ErrorCategory::Comparison].push_back({i, w.size() == 3 ? 1 : 0});
            } else if (w.size() == 4 && w[1] == ",") {
                sites[in_compare ? ErrorCategory::Comparison : ErrorCategory::Subtraction].push_back({i, 2});
            } else if (std::find(w.begin(), w.end(), "-") != w.end() && std::find(w.begin(), w.end(), "=") != w.end()) {
                sites[ErrorCategory::Subtraction].push_back({i, 3});
                if (i + 1 < a.size() && is_write(a[i + 1])) {
                    sites[ErrorCategory::Subtraction].push_back({i + 1, 4});
                }
            } else if (std::find(w.begin(), w.end(), "+") != w.end()) {
                sites[ErrorCategory::Other].push_back({i, 3});
            }
            continue;
        }
        if (const auto* l = std::get_if<Look>(&a[i])) {
            (void)l;
            if (answer_stage == 1 || answer_stage == 2) {
                ++answer_stage;
            }
            continue;
        }
        if (const auto* wr = std::get_if<Write>(&a[i])) {
            in_compare = false;
            if (i == 0) {
                sites[ErrorCategory::InitialTranscription].push_back({i, 4});
                continue;
            }
            if (after_minus) {
                sites[ErrorCategory::InterAreaCopy].push_back({i, 4});
            }
            after_minus = wr->pairs.size() == 1 && wr->pairs[0].symbol == '-';
            if (answer_stage == 3 && wr->pairs.size() == 1 && wr->pairs[0].at.coord.y != 1) {
                sites[ErrorCategory::InterAreaCopy].push_back({i, 4});
                sites[ErrorCategory::Other].push_back({i, 5});
                answer_stage = 0;
            }
            const bool has_plus = std::any_of(wr->pairs.begin(), wr->pairs.end(),
                                              [](const CellSymbol& p) { return p.symbol == '+'; });
            if (has_plus) {
                sites[ErrorCategory::InterAreaCopy].push_back({i, 6});
            }
            continue;
        }
        in_compare = false;  // clear
    }
    return sites;
}

bool apply_site(std::vector<Action>& a, const Site& s, Rng& rng) {
    switch (s.kind) {
        case 0: {  // final answer digit, or a bare digit count
            auto& n = std::get<NoOp>(a[s.index]);
            std::vector<std::string> w = words_of(n.text);
            std::vector<std::size_t> digits;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (w[i].size() == 1 && is_digit(w[i][0])) {
                    digits.push_back(i);
                }
            }
            if (digits.empty()) {
                return false;
            }
            std::string& d = w[digits[rng.below(digits.size())]];
            d[0] = other_digit(d[0], rng);
            n.text.clear();
            for (const std::string& x : w) {
                n.text += n.text.empty() ? x : " " + x;
            }
            return true;
        }
        case 1:  // "N digits word": change the word
        case 2: {  // "a , b word": change the word
            auto& n = std::get<NoOp>(a[s.index]);
            std::vector<std::string> w = words_of(n.text);
            w.back() = other_relation(w.back(), rng);
            n.text.clear();
            for (const std::string& x : w) {
                n.text += n.text.empty() ? x : " " + x;
            }
            return true;
        }
        case 3:
            return mutate_result(std::get<NoOp>(a[s.index]), rng);
        case 4:
            return mutate_write_digit(std::get<Write>(a[s.index]), rng);
        case 5:
            a.erase(a.begin() + static_cast<std::ptrdiff_t>(s.index));
            return true;
        case 6: {  // one addend digit right of '+'
            auto& wr = std::get<Write>(a[s.index]);
            std::vector<std::size_t> digits;
            int plus_row = -1;
            int plus_x = 0;
            for (const CellSymbol& p : wr.pairs) {
                if (p.symbol == '+') {
                    plus_row = p.at.coord.y;
                    plus_x = p.at.coord.x;
                }
            }
            for (std::size_t i = 0; i < wr.pairs.size(); ++i) {
                const CellSymbol& p = wr.pairs[i];
                if (p.at.coord.y == plus_row && p.at.coord.x > plus_x && is_digit(p.symbol)) {
                    digits.push_back(i);
                }
            }
            if (digits.empty()) {
                return false;
            }
            char& c = wr.pairs[digits[rng.below(digits.size())]].symbol;
            c = other_digit(c, rng);
            return true;
        }
    }
    return false;
}

std::int64_t random_operand(Rng& rng, std::int64_t min_value) {
    const int digits = static_cast<int>(rng.between(1, 8));
    std::int64_t lo = 1;
    for (int i = 1; i < digits; ++i) {
        lo *= 10;
    }
    return rng.between(digits == 1 ? min_value : lo, lo * 10 - 1);
}

}  // namespace

std::vector<Mutation> mutation_corpus(std::uint64_t seed, std::size_t per_category) {
    Rng rng(seed);
    std::vector<Mutation> out;
    for (ErrorCategory cat : kAllCategories) {
        std::size_t made = 0;
        while (made < per_category) {
            Problem p;
            p.dividend = random_operand(rng, 0);
            p.divisor = random_operand(rng, 1);
            p.question = rng.chance(0.5) ? QuestionTemplate::WhatIs : QuestionTemplate::Calculate;
            std::vector<Action> actions = demonstrate(p, Variant::Full).actions;
            auto sites = find_sites(actions);
            const auto it = sites.find(cat);
            if (it == sites.end() || it->second.empty()) {
                continue;
            }
            const Site site = it->second[rng.below(it->second.size())];
            if (!apply_site(actions, site, rng)) {
                continue;
            }
            Mutation m;
            m.problem = p;
            m.intended = cat;
            m.transcript = serialize_actions(actions);
            m.description = std::string(to_string(cat)) + " edit at action " + std::to_string(site.index);
            out.push_back(std::move(m));
            ++made;
        }
    }
    return out;
}

}  // namespace teachdemo
