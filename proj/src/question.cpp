#include "teachdemo/question.hpp"

#include <stdexcept>
#include <vector>

#include "teachdemo/errors.hpp"

namespace teachdemo {

namespace {

constexpr std::string_view kWhatIsHead = "What is the remainder when ";
constexpr std::string_view kWhatIsTail = "?";
constexpr std::string_view kCalculateHead = "Calculate the remainder when ";
constexpr std::string_view kCalculateTail = ".";
constexpr std::string_view kMiddle = " is divided by ";

// Canonical decimal: 1-8 digits, no leading zero unless the value is 0.
bool parse_operand(std::string_view s, std::int64_t& out) {
    if (s.empty() || s.size() > 8 || (s.size() > 1 && s[0] == '0')) {
        return false;
    }
    std::int64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

std::vector<std::string_view> split_spaces(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\n' || s[i] == '\t' || s[i] == '\r')) {
            ++i;
        }
        const std::size_t b = i;
        while (i < s.size() && !(s[i] == ' ' || s[i] == '\n' || s[i] == '\t' || s[i] == '\r')) {
            ++i;
        }
        if (i > b) {
            out.push_back(s.substr(b, i - b));
        }
    }
    return out;
}

}  // namespace

bool is_valid(const Problem& p) noexcept {
    return p.dividend >= 0 && p.dividend <= kMaxOperand && p.divisor >= 1 && p.divisor <= kMaxOperand;
}

void validate(const Problem& p) {
    if (!is_valid(p)) {
        throw std::invalid_argument("operands must satisfy 0 <= dividend <= 99999999 and "
                                    "1 <= divisor <= 99999999");
    }
}

std::string render_question(const Problem& p) {
    validate(p);
    std::string out(p.question == QuestionTemplate::WhatIs ? kWhatIsHead : kCalculateHead);
    out += std::to_string(p.dividend);
    out += kMiddle;
    out += std::to_string(p.divisor);
    out += p.question == QuestionTemplate::WhatIs ? kWhatIsTail : kCalculateTail;
    return out;
}

Problem parse_question(std::string_view text) {
    Problem p;
    std::string_view tail;
    if (text.starts_with(kWhatIsHead)) {
        p.question = QuestionTemplate::WhatIs;
        text.remove_prefix(kWhatIsHead.size());
        tail = kWhatIsTail;
    } else if (text.starts_with(kCalculateHead)) {
        p.question = QuestionTemplate::Calculate;
        text.remove_prefix(kCalculateHead.size());
        tail = kCalculateTail;
    } else {
        throw UnrecognizedTemplate("not a remainder question: " + std::string(text));
    }
    const std::size_t mid = text.find(kMiddle);
    if (mid == std::string_view::npos || !text.ends_with(tail)) {
        throw UnrecognizedTemplate("not a remainder question: " + std::string(text));
    }
    const std::string_view dividend = text.substr(0, mid);
    const std::string_view divisor =
        text.substr(mid + kMiddle.size(), text.size() - mid - kMiddle.size() - tail.size());
    if (!parse_operand(dividend, p.dividend) || !parse_operand(divisor, p.divisor) || p.divisor == 0) {
        throw UnrecognizedTemplate("unsupported operands in: " + std::string(text));
    }
    return p;
}

std::string encode_question(std::string_view text) {
    std::string out;
    int position = 0;
    for (char c : text) {
        if (c == ' ') {
            out += "200 _ ";
            position = 0;
            continue;
        }
        if (!(c > ' ' && c < 0x7f)) {
            throw std::invalid_argument("questions may contain printable ASCII and single spaces only");
        }
        if (++position > 99) {
            throw std::invalid_argument("word longer than 99 characters");
        }
        out += std::to_string(200 + position);
        out += ' ';
        out += c;
        out += ' ';
    }
    out += "200 _";
    return out;
}

std::string decode_question(std::string_view encoded) {
    const std::vector<std::string_view> tokens = split_spaces(encoded);
    if (tokens.size() < 2 || tokens.size() % 2 != 0) {
        throw MalformedEncoding("encoding must be position/character pairs");
    }
    std::string out;
    int expected = 1;
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
        const std::string_view pos = tokens[i];
        const std::string_view ch = tokens[i + 1];
        if (pos.size() != 3 || pos[0] != '2' || pos[1] < '0' || pos[1] > '9' || pos[2] < '0' ||
            pos[2] > '9' || ch.size() != 1) {
            throw MalformedEncoding("bad pair '" + std::string(pos) + " " + std::string(ch) + "'");
        }
        const int k = (pos[1] - '0') * 10 + (pos[2] - '0');
        if (k == 0) {
            if (ch != "_") {
                throw MalformedEncoding("position 200 must carry '_'");
            }
            if (i + 2 < tokens.size()) {
                out += ' ';
            }
            expected = 1;
            continue;
        }
        if (k != expected) {
            throw MalformedEncoding("position " + std::string(pos) + " out of sequence");
        }
        out += ch[0];
        ++expected;
    }
    if (tokens[tokens.size() - 2] != "200") {
        throw MalformedEncoding("encoding must end with \"200 _\"");
    }
    return out;
}

std::string question_prompt(const Problem& p) { return encode_question(render_question(p)) + " |"; }

}  // namespace teachdemo
