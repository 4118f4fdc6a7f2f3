#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "teachdemo/grid.hpp"

namespace teachdemo {

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokenKind {
    Write,      // "write"
    Look,       // "look"
    Clear,      // "clear"
    LBrace,     // "{"
    RBrace,     // "}"
    RunCoord,   // "XX,YY:2NN"
    Symbol,     // any single character, including one-digit numerals
    CoordPart,  // two-digit numeral
    Count,      // three-digit numeral 200-299
    Word,       // everything else
};

const char* to_string(TokenKind kind) noexcept;

struct RunCoord {
    Coord coord;
    int count_token = kCountBase + 1;  // 201..299

    int run_count() const noexcept { return count_token - kCountBase; }
    friend bool operator==(const RunCoord&, const RunCoord&) = default;
};

struct Token {
    TokenKind kind = TokenKind::Word;
    std::string text;
    std::size_t offset = 0;  // byte offset of the lexeme in the source text
    RunCoord run_coord{};    // valid when kind == RunCoord

    char symbol() const noexcept { return text.empty() ? '\0' : text.front(); }
};

/// Splits on ASCII whitespace and classifies each lexeme. Total: never throws.
std::vector<Token> lex(std::string_view text);

/// Parses "XX,YY:2NN" with zero-padded two-digit coordinates in 0..98 and a
/// count token in 201..299.
bool parse_run_coord(std::string_view lexeme, RunCoord& out) noexcept;

std::string format_run_coord(const RunCoord& rc);

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

struct CellSymbol {
    RunCoord at;
    char symbol = kEmptySymbol;

    friend bool operator==(const CellSymbol&, const CellSymbol&) = default;
};

struct Write {
    std::vector<CellSymbol> pairs;
    friend bool operator==(const Write&, const Write&) = default;
};

struct Look {
    std::vector<CellSymbol> pairs;
    friend bool operator==(const Look&, const Look&) = default;
};

struct Clear {
    friend bool operator==(const Clear&, const Clear&) = default;
};

/// Text between braces, whitespace-normalized (single spaces, trimmed).
struct NoOp {
    std::string text;
    friend bool operator==(const NoOp&, const NoOp&) = default;
};

using Action = std::variant<Write, Look, Clear, NoOp>;

// Symbols an action may carry: printable, non-space, and not a brace.
constexpr bool is_action_symbol(char c) noexcept { return is_cell_symbol(c) && c != '{' && c != '}'; }

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

enum class ParseMode { Strict, Tolerant };

enum class DiagnosticKind { UnexpectedToken, DanglingPair, UnterminatedBrace };

const char* to_string(DiagnosticKind kind) noexcept;

struct ParseDiagnostic {
    std::size_t token_index = 0;  // first token the diagnostic covers
    std::size_t token_count = 1;  // tokens consumed by this diagnostic
    DiagnosticKind kind = DiagnosticKind::UnexpectedToken;
    std::string context;
};

/// Half-open token range [begin, end) an action was parsed from.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct ParseResult {
    std::vector<Action> actions;
    std::vector<TokenSpan> spans;  // parallel to actions
    std::vector<ParseDiagnostic> diagnostics;
    std::vector<Token> trailing;   // unconsumed suffix (Tolerant mode only)
    std::size_t trailing_begin = 0;
};

/// Strict mode throws MalformedAction on the first grammar violation.
/// Tolerant mode skips malformed tokens with a diagnostic and returns an
/// incomplete final action as `trailing`. With end_of_input == false the last
/// write/look is also held back as trailing because more pairs may follow.
ParseResult parse_actions(std::span<const Token> tokens, ParseMode mode, bool end_of_input = true);

/// Convenience: lex + Strict parse; returns the actions.
std::vector<Action> parse_strict(std::string_view text);

std::string serialize(const Action& action);
std::string serialize_actions(std::span<const Action> actions);

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

struct LookMismatch {
    enum class Kind { Symbol, Count };
    Kind kind = Kind::Symbol;
    Coord coord;
    char expected = kEmptySymbol;  // environment symbol
    char recorded = kEmptySymbol;  // symbol in the action
    int expected_count = 0;        // environment count token
    int recorded_count = 0;        // count token in the action
};

/// Applies `action` to `grid`. Writes mutate; Clear clears the scratch area;
/// NoOp does nothing; Look only reports disagreements with the grid.
std::vector<LookMismatch> execute(const Action& action, Grid& grid);

bool is_noop(const Action& a) noexcept;
bool is_look(const Action& a) noexcept;
bool is_write(const Action& a) noexcept;

}  // namespace teachdemo
