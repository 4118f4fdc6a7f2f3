#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "teachdemo/rng.hpp"

namespace teachdemo {

inline constexpr int kDefaultMaxNewTokens = 1024;

struct GenerateRequest {
    std::string session_id;
    std::string prefix;
    int max_new_tokens = kDefaultMaxNewTokens;
    // Leading tokens, in the generator's own units, to drop from the prefix
    // before conditioning on it. Zero sends no hint.
    int trim_tokens = 0;
};

struct GenerateResponse {
    std::string text;
    bool eos = false;
    int token_count = 0;
};

/// A continuation source. One instance serves one session.
class Generator {
public:
    virtual ~Generator() = default;
    virtual GenerateResponse generate(const GenerateRequest& request) = 0;
};

using GeneratorPtr = std::unique_ptr<Generator>;
/// Builds the generator for one session.
using GeneratorFactory = std::function<GeneratorPtr(const std::string& session_id)>;

/// Number of whitespace-delimited lexemes; the built-in token accounting.
int count_lexemes(std::string_view text) noexcept;

/// Replays the canonical Full demonstration for the question in the prefix.
/// The position is the number of lexemes after the "|" that ends the
/// prompt, so a prefix amended by forcing keeps its place. Output is
/// " tok tok ..." (leading space) and eos is set once the demonstration is
/// exhausted. Throws UnparseablePrefix.
class OracleGenerator final : public Generator {
public:
    GenerateResponse generate(const GenerateRequest& request) override;

private:
    std::map<std::string, std::vector<std::string>, std::less<>> cache_;  // prompt -> lexemes
};

enum class NoiseMode {
    LookSymbols,    // symbols of look pairs
    WrittenDigits,  // digit symbols of write pairs and one-digit numerals inside no-ops
};

const char* to_string(NoiseMode m) noexcept;

/// Wraps another generator and replaces each eligible symbol of its output,
/// with probability p, by a different symbol. Eligibility depends on the
/// action context, so the prefix is scanned to find where the output starts.
/// The RNG is seeded from seed and the session id and advances across calls.
class NoiseGenerator final : public Generator {
public:
    NoiseGenerator(GeneratorPtr inner, double p, NoiseMode mode, std::uint64_t seed, std::string_view session_id);

    GenerateResponse generate(const GenerateRequest& request) override;

    std::size_t corruptions() const noexcept { return corruptions_; }

private:
    GeneratorPtr inner_;
    double p_;
    NoiseMode mode_;
    Rng rng_;
    std::size_t corruptions_ = 0;
};

/// Returns fixed responses in order; once empty, returns eos with no text.
class ScriptedGenerator final : public Generator {
public:
    explicit ScriptedGenerator(std::vector<GenerateResponse> responses);
    static std::unique_ptr<ScriptedGenerator> from_texts(const std::vector<std::string>& texts);

    GenerateResponse generate(const GenerateRequest& request) override;

    const std::vector<GenerateRequest>& requests() const noexcept { return requests_; }

private:
    std::deque<GenerateResponse> responses_;
    std::vector<GenerateRequest> requests_;
};

/// Parses a generator spec:
///   oracle
///   noise:P[:looks|:digits]   (Noise over Oracle, looks by default)
///   remote:ADDR               (ADDR is tcp://host:port or exec:CMD)
/// Throws std::invalid_argument on a malformed spec.
GeneratorFactory make_generator_factory(std::string_view spec, std::uint64_t seed, int timeout_ms = 60000);

}  // namespace teachdemo
