#include "teachdemo/demonstrator.hpp"

#include <stdexcept>

#include "teachdemo/errors.hpp"

namespace teachdemo {

const char* to_string(Variant v) noexcept {
    switch (v) {
        case Variant::Full: return "full";
        case Variant::WriteLook: return "writelook";
        case Variant::WriteOnly: return "writeonly";
        case Variant::AnswerOnly: return "answer";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
    if (name == "full") return Variant::Full;
    if (name == "writelook" || name == "write-look") return Variant::WriteLook;
    if (name == "writeonly" || name == "write-only") return Variant::WriteOnly;
    if (name == "answer" || name == "answeronly" || name == "answer-only") return Variant::AnswerOnly;
    return std::nullopt;
}

std::string spell_digits(std::int64_t value) {
    const std::string digits = std::to_string(value);
    std::string out;
    for (char c : digits) {
        if (!out.empty()) {
            out += ' ';
        }
        out += c;
    }
    return out;
}

std::string final_remainder_text(std::int64_t remainder) {
    return "final remainder is " + spell_digits(remainder);
}

std::optional<std::int64_t> parse_final_remainder(std::string_view text) noexcept {
    constexpr std::string_view kHead = "final remainder is ";
    if (!text.starts_with(kHead)) {
        return std::nullopt;
    }
    text.remove_prefix(kHead.size());
    std::int64_t value = 0;
    int digits = 0;
    for (char c : text) {
        if (c == ' ') {
            continue;
        }
        if (c < '0' || c > '9' || ++digits > 9) {
            return std::nullopt;
        }
        value = value * 10 + (c - '0');
    }
    if (digits == 0) {
        return std::nullopt;
    }
    return value;
}

namespace {

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

std::string coord_text(const Grid& g, Coord c) {
    return format_coord(c) + ':' + std::to_string(kCountBase + g.run_count(c)) + ' ' + g.read(c);
}

// Records actions while tracking two grids. `live` is what the page looks
// like; `history` ignores `clear` and supplies the count tokens of writes.
class Recorder {
public:
    Recorder() = default;
    // Looks read `view` instead of the recorded page.
    explicit Recorder(const Grid& view) : view_(&view) {}

    const Grid& live() const noexcept { return view_ ? *view_ : live_; }
    std::vector<Action>& actions() noexcept { return actions_; }

    void write(const std::vector<std::pair<Coord, char>>& cells) {
        Write w;
        for (const auto& [at, symbol] : cells) {
            w.pairs.push_back({RunCoord{at, kCountBase + history_.run_count(at)}, symbol});
            history_.write(at, symbol);
            live_.write(at, symbol);
        }
        actions_.emplace_back(std::move(w));
    }

    void write(Coord at, char symbol) { write({{at, symbol}}); }

    void look(const std::vector<Coord>& cells) {
        Look l;
        for (Coord at : cells) {
            l.pairs.push_back({RunCoord{at, kCountBase + live().run_count(at)}, live().read(at)});
        }
        actions_.emplace_back(std::move(l));
    }

    void look(Coord at) { look(std::vector<Coord>{at}); }

    void look(const CellRange& r) { look(cells_of(r)); }

    void note(std::string text) { actions_.emplace_back(NoOp{std::move(text)}); }

    void clear() {
        live_.clear_scratch();
        actions_.emplace_back(Clear{});
    }

    std::string cell(Coord c) const { return coord_text(live(), c); }

    static std::vector<Coord> cells_of(const CellRange& r) {
        std::vector<Coord> out;
        for (int x = r.first_x; x <= r.last_x; ++x) {
            out.push_back({x, r.row});
        }
        return out;
    }

private:
    const Grid* view_ = nullptr;
    Grid live_;
    Grid history_;
    std::vector<Action> actions_;
};

std::vector<Coord> digit_cells(const Grid& g, const CellRange& r) {
    std::vector<Coord> out;
    for (int x = r.first_x; x <= r.last_x; ++x) {
        if (is_digit(g.read({x, r.row}))) {
            out.push_back({x, r.row});
        }
    }
    return out;
}

std::int64_t value_of(const Grid& g, const std::vector<Coord>& cells) {
    std::int64_t v = 0;
    for (Coord c : cells) {
        v = v * 10 + (g.read(c) - '0');
    }
    return v;
}

int digit_at(const Grid& g, Coord c) {
    const char s = g.read(c);
    return is_digit(s) ? s - '0' : 0;
}

const char* relation_word(int a, int b) noexcept {
    if (b > a) return "larger";
    if (b < a) return "smaller";
    return "equal";
}

std::vector<Action> filter(std::vector<Action> actions, Variant variant) {
    if (variant == Variant::Full) {
        return actions;
    }
    std::vector<Action> out;
    for (Action& a : actions) {
        if (is_noop(a) || variant == Variant::AnswerOnly) {
            continue;
        }
        if (is_look(a) && variant == Variant::WriteOnly) {
            continue;
        }
        out.push_back(std::move(a));
    }
    return out;
}

void compare_into(Recorder& rec, const Grid& g, const CellRange& a, const CellRange& b, Verdict& verdict) {
    const std::vector<Coord> da = digit_cells(g, a);
    const std::vector<Coord> db = digit_cells(g, b);
    if (da.empty() || db.empty()) {
        throw EmptyOperand("comparison operand holds no digits");
    }
    const std::string na = std::to_string(da.size());
    const std::string nb = std::to_string(db.size());
    rec.note("compare");
    rec.look(a);
    rec.note(na + " digits");
    rec.look(b);
    if (db.size() > da.size()) {
        rec.note(nb + " digits larger");
        verdict = Verdict::ALess;
        return;
    }
    if (db.size() < da.size()) {
        rec.note(nb + " digits smaller");
        verdict = Verdict::AGreater;
        return;
    }
    rec.note(nb + " digits equal");
    verdict = Verdict::AEqual;
    for (std::size_t i = 0; i < da.size(); ++i) {
        rec.look(da[i]);
        rec.look(db[i]);
        const int x = g.read(da[i]) - '0';
        const int y = g.read(db[i]) - '0';
        rec.note(std::to_string(x) + " , " + std::to_string(y) + ' ' + relation_word(x, y));
        if (x != y) {
            verdict = x < y ? Verdict::ALess : Verdict::AGreater;
            return;
        }
    }
}

// Scratch layout: totals on even rows, addends on odd rows, units digit at
// column 72, '+' one column left of the widest addend digit.
constexpr int kUnitsColumn = 72;

class Demonstrator {
public:
    Demonstrator(const Problem& p, char glyph) : p_(p), glyph_(glyph) {
        validate(p);
        if (!is_cell_symbol(glyph) || is_word_char(glyph) || glyph == '{' || glyph == '}') {
            throw std::invalid_argument("division glyph must be a printable non-word symbol");
        }
        divisor_ = std::to_string(p.divisor);
        dividend_ = std::to_string(p.dividend);
        n_ = static_cast<int>(divisor_.size());
        m_ = static_cast<int>(dividend_.size());
        plus_ = kUnitsColumn - n_;
    }

    std::vector<Action> run() {
        layout();
        Verdict v{};
        compare({2, 0, n_}, m_ >= n_ ? CellRange{2, n_ + 1, 2 * n_} : CellRange{2, n_ + 1, n_ + m_ + 1}, v);

        CellRange seg{2, n_ + 1, 2 * n_};
        if (v == Verdict::AGreater) {
            if (m_ <= n_) {
                rec_.write({n_ + m_, 1}, '0');
                finish({2, n_ + 1, n_ + m_});
                return std::move(rec_.actions());
            }
            rec_.look(Coord{2 * n_ + 1, 2});
            seg.last_x = 2 * n_ + 1;
        }
        rec_.write({seg.last_x, 1}, '0');
        rec_.clear();

        while (true) {
            const CellRange rem = divide_segment(seg);
            const int next_x = seg.last_x + 1;
            rec_.note("read the answer");
            rec_.look(CellRange{rem.row, rem.first_x, rem.last_x + 1});
            const Coord source{next_x, 2};
            rec_.look(source);
            const char d = rec_.live().read(source);
            if (!is_digit(d)) {
                rec_.note(final_remainder_text(value_of(rec_.live(), digit_cells(rec_.live(), rem))));
                return std::move(rec_.actions());
            }
            rec_.write({next_x, rem.row}, d);
            seg = {rem.row, rem.first_x, next_x};
            if (rem.first_x == rem.last_x && rec_.live().read({rem.first_x, rem.row}) == '0') {
                seg.first_x = strip_leading_zeros({rem.row, rem.first_x, next_x});
            }
            rec_.write({next_x, 1}, '0');
            rec_.clear();
        }
    }

private:
    void layout() {
        std::vector<std::pair<Coord, char>> cells;
        for (int i = 0; i < n_; ++i) {
            cells.push_back({{i, 2}, divisor_[static_cast<std::size_t>(i)]});
        }
        cells.push_back({{n_, 2}, glyph_});
        for (int j = 0; j < m_; ++j) {
            cells.push_back({{n_ + 1 + j, 2}, dividend_[static_cast<std::size_t>(j)]});
        }
        rec_.write(cells);
    }

    void compare(const CellRange& a, const CellRange& b, Verdict& v) {
        compare_into(rec_, rec_.live(), a, b, v);
    }

    void finish(const CellRange& rem) {
        rec_.note("read the answer");
        rec_.look(CellRange{rem.row, rem.first_x, rem.last_x + 1});
        rec_.note(final_remainder_text(value_of(rec_.live(), digit_cells(rec_.live(), rem))));
    }

    // Finds the quotient digit for `seg` (placeholder already at
    // (seg.last_x, 1)), subtracts, and returns the remainder cells.
    CellRange divide_segment(const CellRange& seg) {
        const Coord q_at{seg.last_x, 1};
        std::vector<Coord> divisor_cells;
        for (int i = 0; i < n_; ++i) {
            divisor_cells.push_back({i, 2});
        }
        rec_.look(divisor_cells);

        std::vector<std::pair<Coord, char>> start;
        for (int x = plus_ + 1; x < kUnitsColumn; ++x) {
            start.push_back({{x, 0}, kEmptySymbol});
        }
        start.push_back({{kUnitsColumn, 0}, '0'});
        append_addend(start, 1);
        rec_.write(start);

        const CellRange b = seg.row == 2 ? seg : CellRange{seg.row, seg.first_x, seg.last_x + 1};
        int q = 0;
        int r = 0;
        while (true) {
            add(r);
            Verdict v{};
            compare({r + 2, plus_, kUnitsColumn + 1}, b, v);
            if (v == Verdict::AGreater) {
                break;
            }
            rec_.look(q_at);
            rec_.note(rec_.cell(q_at) + " + 1 = " + std::to_string(q + 1));
            std::vector<std::pair<Coord, char>> cells{{q_at, static_cast<char>('1' + q)}};
            append_addend(cells, r + 3);
            rec_.write(cells);
            ++q;
            r += 2;
        }
        if (q == 0) {
            return seg;
        }
        return subtract(seg, r);
    }

    void append_addend(std::vector<std::pair<Coord, char>>& cells, int row) const {
        cells.push_back({{plus_, row}, '+'});
        for (int i = 0; i < n_; ++i) {
            cells.push_back({{plus_ + 1 + i, row}, divisor_[static_cast<std::size_t>(i)]});
        }
    }

    // Rows r and r+1 summed into row r+2.
    void add(int r) {
        const Grid& g = rec_.live();
        bool carry = false;
        for (int x = kUnitsColumn; x > plus_; --x) {
            const Coord top{x, r};
            const Coord bottom{x, r + 1};
            rec_.look({top, bottom});
            int s = digit_at(g, top) + digit_at(g, bottom);
            rec_.note(rec_.cell(top) + " + " + rec_.cell(bottom) + " = " + spell_digits(s));
            if (carry) {
                rec_.note(spell_digits(s) + " + 1 = " + spell_digits(s + 1));
                ++s;
            }
            rec_.write({x, r + 2}, static_cast<char>('0' + s % 10));
            carry = s >= 10;
            if (carry) {
                rec_.note("carry the 1");
            }
        }
        const Coord top{plus_, r};
        rec_.look({top, Coord{plus_, r + 1}});
        const int a = digit_at(g, top);
        rec_.note(std::to_string(a) + " + 0 = " + std::to_string(a));
        int s = a;
        if (carry) {
            rec_.note(std::to_string(s) + " + 1 = " + std::to_string(s + 1));
            ++s;
        }
        if (s > 0) {
            rec_.write({plus_, r + 2}, static_cast<char>('0' + s));
        }
    }

    CellRange subtract(const CellRange& seg, int total_row) {
        const Grid& g = rec_.live();
        const CellRange window{total_row, plus_, kUnitsColumn + 1};
        rec_.look(window);
        const std::vector<Coord> total = digit_cells(g, window);
        const int row = seg.row;

        rec_.write({seg.first_x - 1, row + 1}, '-');
        std::vector<std::pair<Coord, char>> copy;
        const int first = seg.last_x - static_cast<int>(total.size()) + 1;
        for (std::size_t i = 0; i < total.size(); ++i) {
            copy.push_back({{first + static_cast<int>(i), row + 1}, g.read(total[i])});
        }
        rec_.write(copy);

        for (int x = seg.last_x; x >= seg.first_x; --x) {
            const Coord top{x, row};
            const Coord bottom{x, row + 1};
            rec_.look(top);
            rec_.look(bottom);
            const int a = digit_at(g, top);
            const int b = digit_at(g, bottom);
            rec_.note(std::to_string(a) + " , " + std::to_string(b) + ' ' + relation_word(a, b));
            int diff = a - b;
            if (b > a) {
                rec_.note("borrow a 1");
                borrow_from(x - 1, row);
                diff += 10;
                rec_.note(spell_digits(a + 10) + " - " + std::to_string(b) + " = " + std::to_string(diff));
            } else {
                rec_.note(std::to_string(a) + " - " + std::to_string(b) + " = " + std::to_string(diff));
            }
            rec_.write({x, row + 2}, static_cast<char>('0' + diff));
        }
        const int start = strip_leading_zeros({row + 2, seg.first_x, seg.last_x});
        return {row + 2, start, seg.last_x};
    }

    void borrow_from(int x, int row) {
        for (; x >= 0; --x) {
            const Coord c{x, row};
            rec_.look(c);
            const int d = digit_at(rec_.live(), c);
            if (d == 0) {
                rec_.note("change 0 to 9");
                rec_.write(c, '9');
                continue;
            }
            rec_.note(std::to_string(d) + " - 1 = " + std::to_string(d - 1));
            rec_.write(c, static_cast<char>('0' + d - 1));
            return;
        }
        throw std::logic_error("borrow ran off the segment");
    }

    // Erases leading zeros of r (keeping its last cell); returns the new
    // first column.
    int strip_leading_zeros(const CellRange& r) {
        int x = r.first_x;
        for (; x <= r.last_x; ++x) {
            const Coord c{x, r.row};
            rec_.look(c);
            if (x == r.last_x || rec_.live().read(c) != '0') {
                break;
            }
            rec_.write(c, kEmptySymbol);
        }
        return x;
    }

    Problem p_;
    char glyph_;
    std::string divisor_;
    std::string dividend_;
    int n_ = 0;
    int m_ = 0;
    int plus_ = 0;
    Recorder rec_;
};

}  // namespace

CompareOutcome compare_sequence(const Grid& grid, const CellRange& a, const CellRange& b, Variant variant) {
    Recorder rec(grid);
    CompareOutcome out;
    compare_into(rec, grid, a, b, out.verdict);
    out.actions = filter(std::move(rec.actions()), variant);
    return out;
}

Demonstration demonstrate(const Problem& problem, Variant variant, char glyph) {
    Demonstration d;
    d.problem = problem;
    d.variant = variant;
    d.actions = project(Demonstrator(problem, glyph).run(), variant);
    return d;
}

std::vector<Action> project(const std::vector<Action>& full, Variant variant) {
    if (full.empty() || !is_noop(full.back())) {
        throw MissingFinalNoOp("demonstration does not end with a no-op");
    }
    std::vector<Action> out = filter(full, variant);
    if (variant != Variant::Full) {
        out.push_back(full.back());
    }
    return out;
}

std::string training_record(const Demonstration& demo) {
    return encode_question(render_question(demo.problem)) + " | " + serialize_actions(demo.actions);
}

VerifyReport verify_demonstration(const Demonstration& demo) {
    VerifyReport report;
    for (const Action& a : demo.actions) {
        std::vector<LookMismatch> m = execute(a, report.final_grid);
        report.look_mismatches.insert(report.look_mismatches.end(), m.begin(), m.end());
        if (const auto* noop = std::get_if<NoOp>(&a)) {
            if (!report.final_answer) {
                report.final_answer = parse_final_remainder(noop->text);
            }
        }
    }
    if (!report.final_answer) {
        throw MissingFinalNoOp("no \"final remainder is N\" no-op");
    }
    report.answer_correct = *report.final_answer == demo.problem.remainder();
    return report;
}

}  // namespace teachdemo
