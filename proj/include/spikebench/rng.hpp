#pragma once

// Deterministic randomness. Every random draw in the library flows through
// SeededRng so that a stream is reproducible from a single 64-bit seed.
// Generator: std::mt19937_64 (algorithm pinned by the C++ standard); normal
// variates via the cosine-form Box-Muller transform; bounded integers via
// rejection sampling. Identifier echoed into stream headers:
// "mt19937_64-boxmuller-v1".

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace spikebench {

inline constexpr const char* kRngAlgorithm = "mt19937_64-boxmuller-v1";

// splitmix64 (Vigna); used only to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a substream seed from a base seed and a list of tags
/// (channel ids, sigma bit patterns, ...). Order of tags matters.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t t : tags) {
        h = splitmix64(h ^ t);
    }
    return h;
}

class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_open_double() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t next_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("next_index: n must be positive");
        const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
        std::uint64_t x = next_u64();
        while (x < reject_below) x = next_u64();
        return x % n;
    }

    /// Standard normal variate, cosine-form Box-Muller (one variate per two uniforms).
    double next_gaussian() {
        const double u1 = next_open_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::uint64_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static constexpr double kTwoPi = 6.283185307179586476925286766559;
    std::mt19937_64 gen_;
};

}  // namespace spikebench
