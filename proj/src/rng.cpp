#include "teachdemo/rng.hpp"

#include <limits>

namespace teachdemo {

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection keeps the draw unbiased: discard the partial final bucket.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = next();
    while (v >= limit) {
        v = next();
    }
    return v % n;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash) noexcept {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace teachdemo
