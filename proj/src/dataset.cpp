#include "teachdemo/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "teachdemo/errors.hpp"
#include "teachdemo/rng.hpp"

namespace teachdemo {

const char* pool_directory(Pool p) noexcept {
    switch (p) {
        case Pool::TrainEasy: return "train-easy";
        case Pool::TrainMedium: return "train-medium";
        case Pool::TrainHard: return "train-hard";
        case Pool::Interpolated: return "interpolate";
    }
    return "?";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

bool parse_answer(const std::string& s, std::int64_t& out) {
    if (s.empty() || s.size() > 9) {
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

std::int64_t random_operand(Rng& rng, int max_digits, std::int64_t min_value) {
    const int digits = static_cast<int>(rng.between(1, max_digits));
    std::int64_t lo = 1;
    for (int i = 1; i < digits; ++i) {
        lo *= 10;
    }
    const std::int64_t hi = lo * 10 - 1;
    if (digits == 1) {
        lo = min_value;
    }
    return rng.between(lo, hi);
}

std::string hex64(std::uint64_t v) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = kHex[v & 0xf];
        v >>= 4;
    }
    return s;
}

// Hands out pool entries in a seeded order, skipping any question already
// used by an earlier draw.
class PoolCursor {
public:
    PoolCursor(const std::vector<QAPair>& pool, Rng& rng) : pool_(&pool) {
        order_.resize(pool.size());
        for (std::size_t i = 0; i < order_.size(); ++i) {
            order_[i] = i;
        }
        shuffle(order_, rng);
    }

    void take(std::size_t n, std::unordered_set<std::string>& used, std::vector<QAPair>& out, Pool which) {
        for (std::size_t got = 0; got < n;) {
            if (next_ == order_.size()) {
                throw InsufficientPool(std::string("pool ") + pool_directory(which) + " has too few distinct questions");
            }
            const QAPair& qa = (*pool_)[order_[next_++]];
            if (used.insert(qa.question).second) {
                out.push_back(qa);
                ++got;
            }
        }
    }

private:
    const std::vector<QAPair>* pool_;
    std::vector<std::size_t> order_;
    std::size_t next_ = 0;
};

}  // namespace

std::vector<QAPair> load_qa_file(const std::filesystem::path& path, Pool source) {
    std::vector<std::string> lines = lines_of(read_file(path));
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    if (lines.size() % 2 != 0) {
        throw OddLineCount(path.string() + ": " + std::to_string(lines.size()) + " lines");
    }
    std::vector<QAPair> pairs;
    pairs.reserve(lines.size() / 2);
    for (std::size_t i = 0; i < lines.size(); i += 2) {
        QAPair qa;
        qa.question = lines[i];
        qa.answer = lines[i + 1];
        qa.source = source;
        try {
            qa.problem = parse_question(qa.question);
        } catch (const UnrecognizedTemplate& e) {
            spdlog::warn("{}:{}: skipping unparseable question: {}", path.string(), i + 1, e.what());
            continue;
        }
        std::int64_t answer = 0;
        if (!parse_answer(qa.answer, answer) || answer != qa.problem.remainder()) {
            spdlog::warn("{}:{}: skipping pair with wrong answer '{}'", path.string(), i + 2, qa.answer);
            continue;
        }
        pairs.push_back(std::move(qa));
    }
    return pairs;
}

Pools load_pools(const std::filesystem::path& data_dir) {
    Pools pools;
    for (Pool p : kAllPools) {
        pools[static_cast<std::size_t>(p)] = load_qa_file(data_dir / pool_directory(p) / kModuleFile, p);
    }
    return pools;
}

Pools synthesize_pools(std::uint64_t seed, std::size_t per_pool) {
    Rng rng(seed);
    Pools pools;
    for (Pool p : kAllPools) {
        const int max_digits = p == Pool::TrainEasy ? 4 : p == Pool::TrainMedium ? 6 : 8;
        auto& pool = pools[static_cast<std::size_t>(p)];
        pool.reserve(per_pool);
        for (std::size_t i = 0; i < per_pool; ++i) {
            QAPair qa;
            qa.problem.dividend = random_operand(rng, max_digits, 0);
            qa.problem.divisor = random_operand(rng, max_digits, 1);
            qa.problem.question = rng.chance(0.5) ? QuestionTemplate::WhatIs : QuestionTemplate::Calculate;
            qa.question = render_question(qa.problem);
            qa.answer = std::to_string(qa.problem.remainder());
            qa.source = p;
            pool.push_back(std::move(qa));
        }
    }
    return pools;
}

std::array<std::size_t, 3> apportion(std::size_t total) noexcept {
    const std::size_t base = total / 3;
    const std::size_t extra = total % 3;
    return {base + (extra > 0 ? 1 : 0), base + (extra > 1 ? 1 : 0), base};
}

Splits sample_splits(const Pools& pools, const SplitPlan& plan) {
    Rng rng(plan.seed);
    std::vector<PoolCursor> cursors;
    for (Pool p : kAllPools) {
        cursors.emplace_back(pools[static_cast<std::size_t>(p)], rng);
    }
    std::unordered_set<std::string> used;
    Splits s;
    auto mixed = [&](std::size_t total, std::vector<QAPair>& out) {
        const auto counts = apportion(total);
        for (std::size_t k = 0; k < 3; ++k) {
            cursors[k].take(counts[k], used, out, kAllPools[k]);
        }
        shuffle(out, rng);
    };
    mixed(plan.train, s.train);
    mixed(plan.validation, s.validation);
    mixed(plan.test_mixed, s.test_mixed);
    cursors[3].take(plan.test_interpolated, used, s.test_interpolated, Pool::Interpolated);
    return s;
}

std::string Manifest::render() const {
    std::string out;
    for (const auto& [k, v] : entries) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

Manifest Manifest::parse(std::string_view text) {
    Manifest m;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t end = text.find('\n', i);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(i, end - i);
        const std::size_t eq = line.find('=');
        if (eq != std::string_view::npos) {
            m.entries[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
        }
        i = end + 1;
    }
    return m;
}

Manifest build_training_file(const std::vector<QAPair>& split, const BuildOptions& options,
                             const std::filesystem::path& out_path) {
    const std::string separator = "\n" + options.marker + "\n";
    std::string text;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (i > 0) {
            text += separator;
        }
        Problem p = parse_question(split[i].question);
        text += training_record(demonstrate(p, options.variant));
    }
    text += '\n';
    write_file(out_path, text);

    Manifest m;
    m.entries["split"] = options.split_name;
    m.entries["records"] = std::to_string(split.size());
    m.entries["variant"] = to_string(options.variant);
    m.entries["seed"] = std::to_string(options.seed);
    m.entries["marker"] = options.marker;
    m.entries["source"] = options.synthetic ? "synthetic" : "deepmind";
    m.entries["checksum"] = "fnv1a64:" + hex64(fnv1a64(text));
    m.entries["bytes"] = std::to_string(text.size());
    std::filesystem::path manifest_path = out_path;
    manifest_path += ".manifest";
    write_file(manifest_path, m.render());
    return m;
}

std::vector<std::string> split_records(std::string_view file_text, std::string_view marker) {
    std::vector<std::string> out;
    const std::string separator = "\n" + std::string(marker) + "\n";
    if (file_text.ends_with('\n')) {
        file_text.remove_suffix(1);
    }
    if (file_text.empty()) {
        return out;
    }
    std::size_t i = 0;
    while (true) {
        const std::size_t at = file_text.find(separator, i);
        if (at == std::string_view::npos) {
            out.emplace_back(file_text.substr(i));
            return out;
        }
        out.emplace_back(file_text.substr(i, at - i));
        i = at + separator.size();
    }
}

ParsedRecord parse_record(std::string_view record) {
    const std::size_t bar = record.find(" | ");
    if (bar == std::string_view::npos) {
        throw MalformedEncoding("record has no \" | \" separator");
    }
    ParsedRecord r;
    r.question = decode_question(record.substr(0, bar));
    r.actions = parse_strict(record.substr(bar + 3));
    return r;
}

void write_qa_file(const std::vector<QAPair>& split, const std::filesystem::path& path) {
    std::string text;
    for (const QAPair& qa : split) {
        text += qa.question;
        text += '\n';
        text += qa.answer;
        text += '\n';
    }
    write_file(path, text);
}

std::vector<Problem> load_questions(const std::filesystem::path& path) {
    std::vector<Problem> out;
    const std::vector<std::string> lines = lines_of(read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) {
            continue;
        }
        std::int64_t ignored = 0;
        if (parse_answer(line, ignored)) {
            continue;
        }
        try {
            out.push_back(parse_question(line));
        } catch (const UnrecognizedTemplate&) {
            spdlog::warn("{}:{}: not a remainder question, skipped", path.string(), i + 1);
        }
    }
    return out;
}

}  // namespace teachdemo
