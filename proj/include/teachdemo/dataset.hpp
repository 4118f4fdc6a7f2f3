#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teachdemo/actions.hpp"
#include "teachdemo/demonstrator.hpp"
#include "teachdemo/question.hpp"

namespace teachdemo {

enum class Pool { TrainEasy, TrainMedium, TrainHard, Interpolated };

inline constexpr std::array<Pool, 4> kAllPools{Pool::TrainEasy, Pool::TrainMedium, Pool::TrainHard,
                                               Pool::Interpolated};

/// Directory name used by the DeepMind Mathematics Dataset release.
const char* pool_directory(Pool p) noexcept;

inline constexpr std::string_view kModuleFile = "numbers__div_remainder.txt";
inline constexpr std::string_view kDefaultMarker = "<|endoftext|>";

struct QAPair {
    std::string question;
    std::string answer;
    Pool source = Pool::TrainEasy;
    Problem problem;  // parse_question(question)
};

using Pools = std::array<std::vector<QAPair>, 4>;  // indexed by Pool

/// Alternating question / answer lines. Throws OddLineCount. Pairs whose
/// question does not parse, or whose answer is not the true remainder, are
/// skipped with a warning.
std::vector<QAPair> load_qa_file(const std::filesystem::path& path, Pool source);

/// Loads <dir>/<pool>/numbers__div_remainder.txt for every pool.
Pools load_pools(const std::filesystem::path& data_dir);

/// Offline stand-in for the DeepMind files: operands with digit lengths drawn
/// uniformly from 1..4 (easy), 1..6 (medium), 1..8 (hard, interpolated).
Pools synthesize_pools(std::uint64_t seed, std::size_t per_pool);

struct SplitPlan {
    std::size_t train = 200;
    std::size_t validation = 100;
    std::size_t test_mixed = 500;
    std::size_t test_interpolated = 500;
    std::uint64_t seed = 0;
};

struct Splits {
    std::vector<QAPair> train;
    std::vector<QAPair> validation;
    std::vector<QAPair> test_mixed;
    std::vector<QAPair> test_interpolated;
};

/// Per-pool counts for a split drawn equally from easy/medium/hard; the
/// remainder goes to easy first, then medium.
std::array<std::size_t, 3> apportion(std::size_t total) noexcept;

/// Deterministic under plan.seed. No question string appears twice across
/// all four splits. Throws InsufficientPool.
Splits sample_splits(const Pools& pools, const SplitPlan& plan);

struct Manifest {
    std::map<std::string, std::string> entries;

    std::string render() const;  // sorted key=value lines
    static Manifest parse(std::string_view text);
};

struct BuildOptions {
    Variant variant = Variant::Full;
    std::string marker{kDefaultMarker};
    std::uint64_t seed = 0;
    bool synthetic = false;
    std::string split_name = "train";
};

/// One record per line of the split, each
///   encode_question(question) + " | " + demonstration
/// joined by "\n" marker "\n". Writes <out_path> and returns its manifest
/// (also written to <out_path>.manifest).
Manifest build_training_file(const std::vector<QAPair>& split, const BuildOptions& options,
                             const std::filesystem::path& out_path);

/// The records of a training file, split on the marker.
std::vector<std::string> split_records(std::string_view file_text, std::string_view marker = kDefaultMarker);

struct ParsedRecord {
    std::string question;
    std::vector<Action> actions;
};

/// Inverse of one training record. Throws MalformedEncoding / MalformedAction.
ParsedRecord parse_record(std::string_view record);

/// Writes the split as alternating question / answer lines.
void write_qa_file(const std::vector<QAPair>& split, const std::filesystem::path& path);

/// Problems from a question file: every non-blank line that parses as a
/// question (answer lines are skipped).
std::vector<Problem> load_questions(const std::filesystem::path& path);

}  // namespace teachdemo
