#include "teachdemo/generator.hpp"

#include <cctype>
#include <stdexcept>

#include "teachdemo/actions.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/errors.hpp"
#include "teachdemo/protocol.hpp"
#include "teachdemo/question.hpp"

namespace teachdemo {

namespace {

bool is_space(char c) noexcept { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct Lexeme {
    std::size_t begin;
    std::size_t end;
};

std::vector<Lexeme> lexemes_of(std::string_view text) {
    std::vector<Lexeme> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) {
            ++i;
        }
        const std::size_t b = i;
        while (i < text.size() && !is_space(text[i])) {
            ++i;
        }
        if (i > b) {
            out.push_back({b, i});
        }
    }
    return out;
}

// Offset just past the "|" lexeme that ends the prompt, or npos.
std::size_t prompt_end(std::string_view prefix) {
    std::size_t i = 0;
    while (i < prefix.size()) {
        while (i < prefix.size() && is_space(prefix[i])) {
            ++i;
        }
        const std::size_t b = i;
        while (i < prefix.size() && !is_space(prefix[i])) {
            ++i;
        }
        if (i == b + 1 && prefix[b] == '|') {
            return i;
        }
    }
    return std::string_view::npos;
}

// Tracks which action slot the next lexeme fills.
class ActionContext {
public:
    enum class Slot { Other, LookSymbol, WriteSymbol, NoOpWord };

    Slot feed(std::string_view lex) {
        if (state_ == State::NoOp) {
            if (lex == "}") {
                state_ = State::Top;
                return Slot::Other;
            }
            return Slot::NoOpWord;
        }
        if (expect_symbol_) {
            expect_symbol_ = false;
            if (lex.size() == 1) {
                return state_ == State::Look ? Slot::LookSymbol : Slot::WriteSymbol;
            }
        }
        RunCoord rc;
        if (lex == "write") {
            state_ = State::Write;
        } else if (lex == "look") {
            state_ = State::Look;
        } else if (lex == "clear") {
            state_ = State::Top;
        } else if (lex == "{") {
            state_ = State::NoOp;
        } else if ((state_ == State::Write || state_ == State::Look) && parse_run_coord(lex, rc)) {
            expect_symbol_ = true;
        }
        return Slot::Other;
    }

private:
    enum class State { Top, Write, Look, NoOp };
    State state_ = State::Top;
    bool expect_symbol_ = false;
};

constexpr std::string_view kLookAlphabet = "0123456789_";

}  // namespace

int count_lexemes(std::string_view text) noexcept {
    int n = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = is_space(c);
        if (!space && !in_word) {
            ++n;
        }
        in_word = !space;
    }
    return n;
}

GenerateResponse OracleGenerator::generate(const GenerateRequest& request) {
    const std::string_view prefix = request.prefix;
    const std::size_t end = prompt_end(prefix);
    if (end == std::string_view::npos) {
        throw UnparseablePrefix("prefix has no \"|\" after the question");
    }
    const std::string_view prompt = prefix.substr(0, end - 1);
    auto it = cache_.find(prompt);
    if (it == cache_.end()) {
        Problem p;
        try {
            p = parse_question(decode_question(prompt));
        } catch (const Error& e) {
            throw UnparseablePrefix(std::string("cannot recover the question: ") + e.what());
        }
        const std::string demo = serialize_actions(demonstrate(p, Variant::Full).actions);
        std::vector<std::string> lexemes;
        for (const Lexeme& l : lexemes_of(demo)) {
            lexemes.emplace_back(demo.substr(l.begin, l.end - l.begin));
        }
        it = cache_.emplace(std::string(prompt), std::move(lexemes)).first;
    }
    const std::vector<std::string>& lexemes = it->second;
    const std::size_t position = static_cast<std::size_t>(count_lexemes(prefix.substr(end)));

    GenerateResponse resp;
    std::size_t i = position;
    const std::size_t budget = static_cast<std::size_t>(std::max(request.max_new_tokens, 0));
    for (; i < lexemes.size() && i - position < budget; ++i) {
        resp.text += ' ';
        resp.text += lexemes[i];
    }
    resp.token_count = static_cast<int>(i > position ? i - position : 0);
    resp.eos = i >= lexemes.size();
    return resp;
}

const char* to_string(NoiseMode m) noexcept {
    return m == NoiseMode::LookSymbols ? "looks" : "digits";
}

NoiseGenerator::NoiseGenerator(GeneratorPtr inner, double p, NoiseMode mode, std::uint64_t seed,
                               std::string_view session_id)
    : inner_(std::move(inner)), p_(p), mode_(mode), rng_(seed ^ fnv1a64(session_id)) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("noise probability must lie in [0, 1]");
    }
}

GenerateResponse NoiseGenerator::generate(const GenerateRequest& request) {
    GenerateResponse resp = inner_->generate(request);
    if (p_ <= 0.0 || resp.text.empty()) {
        return resp;
    }
    ActionContext ctx;
    const std::string_view prefix = request.prefix;
    const std::size_t end = prompt_end(prefix);
    if (end != std::string_view::npos) {
        for (const Lexeme& l : lexemes_of(prefix.substr(end))) {
            ctx.feed(prefix.substr(end + l.begin, l.end - l.begin));
        }
    }
    std::string& text = resp.text;
    for (const Lexeme& l : lexemes_of(text)) {
        const std::string_view lex = std::string_view(text).substr(l.begin, l.end - l.begin);
        const ActionContext::Slot slot = ctx.feed(lex);
        const bool digit = lex.size() == 1 && lex[0] >= '0' && lex[0] <= '9';
        bool eligible = false;
        if (mode_ == NoiseMode::LookSymbols) {
            eligible = slot == ActionContext::Slot::LookSymbol;
        } else {
            eligible = digit && (slot == ActionContext::Slot::WriteSymbol || slot == ActionContext::Slot::NoOpWord);
        }
        if (!eligible || !rng_.chance(p_)) {
            continue;
        }
        char& c = text[l.begin];
        if (mode_ == NoiseMode::WrittenDigits) {
            c = static_cast<char>('0' + (c - '0' + 1 + static_cast<int>(rng_.below(9))) % 10);
        } else {
            const std::size_t own = kLookAlphabet.find(c);
            if (own == std::string_view::npos) {
                c = kLookAlphabet[rng_.below(kLookAlphabet.size())];
            } else {
                c = kLookAlphabet[(own + 1 + rng_.below(kLookAlphabet.size() - 1)) % kLookAlphabet.size()];
            }
        }
        ++corruptions_;
    }
    return resp;
}

ScriptedGenerator::ScriptedGenerator(std::vector<GenerateResponse> responses)
    : responses_(responses.begin(), responses.end()) {}

std::unique_ptr<ScriptedGenerator> ScriptedGenerator::from_texts(const std::vector<std::string>& texts) {
    std::vector<GenerateResponse> responses;
    for (const std::string& t : texts) {
        responses.push_back({t, false, count_lexemes(t)});
    }
    return std::make_unique<ScriptedGenerator>(std::move(responses));
}

GenerateResponse ScriptedGenerator::generate(const GenerateRequest& request) {
    requests_.push_back(request);
    if (responses_.empty()) {
        return {"", true, 0};
    }
    GenerateResponse r = std::move(responses_.front());
    responses_.pop_front();
    return r;
}

GeneratorFactory make_generator_factory(std::string_view spec, std::uint64_t seed, int timeout_ms) {
    if (spec == "oracle") {
        return [](const std::string&) -> GeneratorPtr { return std::make_unique<OracleGenerator>(); };
    }
    if (spec.starts_with("noise:")) {
        std::string_view rest = spec.substr(6);
        NoiseMode mode = NoiseMode::LookSymbols;
        if (const std::size_t colon = rest.find(':'); colon != std::string_view::npos) {
            const std::string_view m = rest.substr(colon + 1);
            if (m == "looks") {
                mode = NoiseMode::LookSymbols;
            } else if (m == "digits") {
                mode = NoiseMode::WrittenDigits;
            } else {
                throw std::invalid_argument("noise mode must be looks or digits");
            }
            rest = rest.substr(0, colon);
        }
        double p = 0.0;
        try {
            std::size_t used = 0;
            p = std::stod(std::string(rest), &used);
            if (used != rest.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("noise probability '" + std::string(rest) + "' is not a number");
        }
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("noise probability must lie in [0, 1]");
        }
        return [p, mode, seed](const std::string& session_id) -> GeneratorPtr {
            return std::make_unique<NoiseGenerator>(std::make_unique<OracleGenerator>(), p, mode, seed, session_id);
        };
    }
    if (spec.starts_with("remote:")) {
        std::string address(spec.substr(7));
        if (!address.starts_with("tcp://") && !address.starts_with("exec:")) {
            throw std::invalid_argument("remote address must be tcp://host:port or exec:CMD");
        }
        return [address, timeout_ms](const std::string&) -> GeneratorPtr {
            return std::make_unique<RemoteGenerator>(address, timeout_ms);
        };
    }
    throw std::invalid_argument("unknown generator '" + std::string(spec) + "' (oracle, noise:P[:looks|:digits], remote:ADDR)");
}

}  // namespace teachdemo
