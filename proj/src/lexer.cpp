#include <cctype>

#include "teachdemo/actions.hpp"

namespace teachdemo {

namespace {

bool is_space(char c) noexcept { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

int two_digits(std::string_view s, std::size_t at) noexcept {
    return (s[at] - '0') * 10 + (s[at + 1] - '0');
}

TokenKind classify(std::string_view lexeme, RunCoord& rc) noexcept {
    if (lexeme == "write") {
        return TokenKind::Write;
    }
    if (lexeme == "look") {
        return TokenKind::Look;
    }
    if (lexeme == "clear") {
        return TokenKind::Clear;
    }
    if (lexeme.size() == 1) {
        if (lexeme[0] == '{') {
            return TokenKind::LBrace;
        }
        if (lexeme[0] == '}') {
            return TokenKind::RBrace;
        }
        return TokenKind::Symbol;
    }
    if (parse_run_coord(lexeme, rc)) {
        return TokenKind::RunCoord;
    }
    if (lexeme.size() == 2 && is_digit(lexeme[0]) && is_digit(lexeme[1])) {
        return TokenKind::CoordPart;
    }
    if (lexeme.size() == 3 && lexeme[0] == '2' && is_digit(lexeme[1]) && is_digit(lexeme[2])) {
        return TokenKind::Count;
    }
    return TokenKind::Word;
}

}  // namespace

const char* to_string(TokenKind kind) noexcept {
    switch (kind) {
        case TokenKind::Write: return "kw:write";
        case TokenKind::Look: return "kw:look";
        case TokenKind::Clear: return "kw:clear";
        case TokenKind::LBrace: return "lbrace";
        case TokenKind::RBrace: return "rbrace";
        case TokenKind::RunCoord: return "runcoord";
        case TokenKind::Symbol: return "sym";
        case TokenKind::CoordPart: return "coord-part";
        case TokenKind::Count: return "count";
        case TokenKind::Word: return "word";
    }
    return "?";
}

bool parse_run_coord(std::string_view s, RunCoord& out) noexcept {
    if (s.size() != 9 || s[2] != ',' || s[5] != ':') {
        return false;
    }
    for (std::size_t i : {0u, 1u, 3u, 4u, 6u, 7u, 8u}) {
        if (!is_digit(s[i])) {
            return false;
        }
    }
    const int x = two_digits(s, 0);
    const int y = two_digits(s, 3);
    const int count = (s[6] - '0') * 100 + two_digits(s, 7);
    if (!in_range({x, y}) || count <= kCountBase || count >= 300) {
        return false;
    }
    out = RunCoord{{x, y}, count};
    return true;
}

std::string format_run_coord(const RunCoord& rc) {
    return format_coord(rc.coord) + ':' + std::to_string(rc.count_token);
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) {
            ++i;
        }
        if (i == text.size()) {
            break;
        }
        const std::size_t begin = i;
        while (i < text.size() && !is_space(text[i])) {
            ++i;
        }
        Token tok;
        tok.text = std::string(text.substr(begin, i - begin));
        tok.offset = begin;
        tok.kind = classify(tok.text, tok.run_coord);
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

}  // namespace teachdemo
