#include "teachdemo/actions.hpp"

#include <algorithm>
#include <type_traits>

#include "teachdemo/errors.hpp"

namespace teachdemo {

const char* to_string(DiagnosticKind kind) noexcept {
    switch (kind) {
        case DiagnosticKind::UnexpectedToken: return "unexpected-token";
        case DiagnosticKind::DanglingPair: return "dangling-pair";
        case DiagnosticKind::UnterminatedBrace: return "unterminated-brace";
    }
    return "?";
}

namespace {

std::string context_around(std::span<const Token> tokens, std::size_t index) {
    const std::size_t begin = index >= 2 ? index - 2 : 0;
    const std::size_t end = std::min(tokens.size(), index + 3);
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (!out.empty()) {
            out += ' ';
        }
        if (i == index) {
            out += ">>";
        }
        out += tokens[i].text;
    }
    return out;
}

bool ends_pair_list(TokenKind kind) noexcept {
    return kind == TokenKind::Write || kind == TokenKind::Look || kind == TokenKind::Clear ||
           kind == TokenKind::LBrace || kind == TokenKind::RBrace;
}

class Parser {
public:
    Parser(std::span<const Token> tokens, ParseMode mode, bool end_of_input)
        : tokens_(tokens), mode_(mode), end_of_input_(end_of_input) {}

    ParseResult run() {
        while (pos_ < tokens_.size() && !stopped_) {
            const Token& tok = tokens_[pos_];
            switch (tok.kind) {
                case TokenKind::Write:
                case TokenKind::Look:
                    pair_action(tok.kind == TokenKind::Write);
                    break;
                case TokenKind::Clear:
                    push(Clear{}, pos_, pos_ + 1);
                    ++pos_;
                    break;
                case TokenKind::LBrace:
                    noop();
                    break;
                default:
                    unexpected_top_level();
                    break;
            }
        }
        if (!stopped_) {
            result_.trailing_begin = tokens_.size();
        }
        return std::move(result_);
    }

private:
    void fail(std::size_t index, const std::string& what) {
        throw MalformedAction(index, what + " at token " + std::to_string(index) + ": " +
                                         context_around(tokens_, index));
    }

    void diagnose(std::size_t index, std::size_t count, DiagnosticKind kind) {
        result_.diagnostics.push_back({index, count, kind, context_around(tokens_, index)});
    }

    void push(Action action, std::size_t begin, std::size_t end) {
        result_.actions.push_back(std::move(action));
        result_.spans.push_back({begin, end});
    }

    // Everything from `begin` on is handed back to the caller unparsed.
    void hand_back(std::size_t begin, std::size_t diagnostics_before) {
        result_.diagnostics.resize(diagnostics_before);
        result_.trailing.assign(tokens_.begin() + static_cast<std::ptrdiff_t>(begin), tokens_.end());
        result_.trailing_begin = begin;
        pos_ = tokens_.size();
        stopped_ = true;
    }

    void unexpected_top_level() {
        if (mode_ == ParseMode::Strict) {
            fail(pos_, std::string("unexpected ") + to_string(tokens_[pos_].kind));
        }
        const std::size_t begin = pos_;
        while (pos_ < tokens_.size()) {
            const TokenKind k = tokens_[pos_].kind;
            if (k == TokenKind::Write || k == TokenKind::Look || k == TokenKind::Clear ||
                k == TokenKind::LBrace) {
                break;
            }
            ++pos_;
        }
        diagnose(begin, pos_ - begin, DiagnosticKind::UnexpectedToken);
    }

    void pair_action(bool is_write) {
        const std::size_t begin = pos_;
        const std::size_t diagnostics_before = result_.diagnostics.size();
        ++pos_;
        std::vector<CellSymbol> pairs;
        while (pos_ < tokens_.size()) {
            const Token& tok = tokens_[pos_];
            if (ends_pair_list(tok.kind)) {
                break;
            }
            if (tok.kind != TokenKind::RunCoord) {
                if (mode_ == ParseMode::Strict) {
                    fail(pos_, std::string("expected XX,YY:2NN coordinate, got ") + to_string(tok.kind));
                }
                diagnose(pos_, 1, DiagnosticKind::UnexpectedToken);
                ++pos_;
                continue;
            }
            if (pos_ + 1 == tokens_.size()) {
                if (mode_ == ParseMode::Strict) {
                    fail(pos_, "coordinate without a symbol");
                }
                hand_back(begin, diagnostics_before);
                return;
            }
            const Token& sym = tokens_[pos_ + 1];
            if (sym.kind != TokenKind::Symbol || !is_action_symbol(sym.symbol())) {
                if (mode_ == ParseMode::Strict) {
                    fail(pos_, "coordinate without a symbol");
                }
                diagnose(pos_, 1, DiagnosticKind::DanglingPair);
                ++pos_;
                continue;
            }
            pairs.push_back({tok.run_coord, sym.symbol()});
            pos_ += 2;
        }

        if (pairs.empty()) {
            if (pos_ == tokens_.size() && result_.diagnostics.size() == diagnostics_before &&
                mode_ == ParseMode::Tolerant) {
                hand_back(begin, diagnostics_before);
                return;
            }
            if (mode_ == ParseMode::Strict) {
                fail(begin, std::string(is_write ? "write" : "look") + " without pairs");
            }
            diagnose(begin, 1, DiagnosticKind::UnexpectedToken);
            return;
        }
        if (pos_ == tokens_.size() && !end_of_input_ && mode_ == ParseMode::Tolerant) {
            hand_back(begin, diagnostics_before);
            return;
        }
        if (is_write) {
            push(Write{std::move(pairs)}, begin, pos_);
        } else {
            push(Look{std::move(pairs)}, begin, pos_);
        }
    }

    void noop() {
        std::size_t begin = pos_;
        std::size_t diagnostics_before = result_.diagnostics.size();
        ++pos_;
        std::string text;
        while (true) {
            if (pos_ == tokens_.size()) {
                if (mode_ == ParseMode::Strict) {
                    fail(begin, "unterminated '{'");
                }
                hand_back(begin, diagnostics_before);
                return;
            }
            const Token& tok = tokens_[pos_];
            if (tok.kind == TokenKind::RBrace) {
                ++pos_;
                push(NoOp{std::move(text)}, begin, pos_);
                return;
            }
            if (tok.kind == TokenKind::LBrace) {
                if (mode_ == ParseMode::Strict) {
                    fail(pos_, "nested '{'");
                }
                // Drop the unfinished outer no-op and restart at the inner brace.
                diagnose(begin, pos_ - begin, DiagnosticKind::UnterminatedBrace);
                begin = pos_;
                diagnostics_before = result_.diagnostics.size();
                text.clear();
                ++pos_;
                continue;
            }
            if (!text.empty()) {
                text += ' ';
            }
            text += tok.text;
            ++pos_;
        }
    }

    std::span<const Token> tokens_;
    ParseMode mode_;
    bool end_of_input_;
    std::size_t pos_ = 0;
    bool stopped_ = false;
    ParseResult result_;
};

void append_pairs(std::string& out, const std::vector<CellSymbol>& pairs) {
    for (const CellSymbol& p : pairs) {
        out += ' ';
        out += format_run_coord(p.at);
        out += ' ';
        out += p.symbol;
    }
}

}  // namespace

ParseResult parse_actions(std::span<const Token> tokens, ParseMode mode, bool end_of_input) {
    return Parser(tokens, mode, end_of_input || mode == ParseMode::Strict).run();
}

std::vector<Action> parse_strict(std::string_view text) {
    const std::vector<Token> tokens = lex(text);
    return parse_actions(tokens, ParseMode::Strict).actions;
}

std::string serialize(const Action& action) {
    std::string out;
    std::visit(
        [&out](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, Write>) {
                out = "write";
                append_pairs(out, a.pairs);
            } else if constexpr (std::is_same_v<T, Look>) {
                out = "look";
                append_pairs(out, a.pairs);
            } else if constexpr (std::is_same_v<T, Clear>) {
                out = "clear";
            } else {
                out = a.text.empty() ? "{ }" : "{ " + a.text + " }";
            }
        },
        action);
    return out;
}

std::string serialize_actions(std::span<const Action> actions) {
    std::string out;
    for (const Action& a : actions) {
        if (!out.empty()) {
            out += ' ';
        }
        out += serialize(a);
    }
    return out;
}

std::vector<LookMismatch> execute(const Action& action, Grid& grid) {
    std::vector<LookMismatch> mismatches;
    if (const auto* w = std::get_if<Write>(&action)) {
        for (const CellSymbol& p : w->pairs) {
            grid.write(p.at.coord, p.symbol);
        }
    } else if (const auto* l = std::get_if<Look>(&action)) {
        for (const CellSymbol& p : l->pairs) {
            const char actual = grid.read(p.at.coord);
            const int count = kCountBase + grid.run_count(p.at.coord);
            if (actual != p.symbol) {
                mismatches.push_back(
                    {LookMismatch::Kind::Symbol, p.at.coord, actual, p.symbol, count, p.at.count_token});
            }
            if (count != p.at.count_token) {
                mismatches.push_back(
                    {LookMismatch::Kind::Count, p.at.coord, actual, p.symbol, count, p.at.count_token});
            }
        }
    } else if (std::holds_alternative<Clear>(action)) {
        grid.clear_scratch();
    }
    return mismatches;
}

bool is_noop(const Action& a) noexcept { return std::holds_alternative<NoOp>(a); }
bool is_look(const Action& a) noexcept { return std::holds_alternative<Look>(a); }
bool is_write(const Action& a) noexcept { return std::holds_alternative<Write>(a); }

}  // namespace teachdemo
