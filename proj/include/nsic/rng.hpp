#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nsic {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed for the stream owned by `consumer` within one replication.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replication,
                                    std::string_view consumer) {
    return mix64(mix64(base ^ mix64(replication + 1)) ^ fnv1a(consumer));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on [lo, hi].
inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer on [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace nsic
