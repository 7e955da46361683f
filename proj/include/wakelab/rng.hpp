// Seedable, portable random generator with derivable substreams.
//
// Every stochastic draw in the project is attributable to a named
// substream keyed by (purpose, a, b), e.g. (direction noise, episode,
// step), so runs are reproducible bit-for-bit regardless of evaluation
// order or thread scheduling. The core generator is xoshiro256** seeded
// through splitmix64; uniform and normal variates are produced without
// relying on implementation-defined <random> distributions.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace wakelab {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t key, std::uint64_t salt) {
    std::uint64_t s = key ^ (0x9e3779b97f4a7c15ULL + (salt << 1));
    std::uint64_t a = splitmix64(s);
    s ^= salt * 0xff51afd7ed558ccdULL;
    return a ^ splitmix64(s);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace detail

/// Substream purposes. Fixed numeric tags keep derived streams stable
/// across versions.
enum class StreamPurpose : std::uint64_t {
    kWindDirection = 1,
    kWindSpeed = 2,
    kDirectionNoise = 3,
    kSpeedNoise = 4,
    kEpisodeInit = 5,
    kActionSampling = 6,
    kModelInit = 7,
    kShuffle = 8,
    kEpisode = 9,
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = detail::splitmix64(s);
    }

    /// Derives an independent generator for (purpose, a, b). Pure function
    /// of the construction seed; does not consume from this stream.
    Rng substream(StreamPurpose purpose, std::uint64_t a = 0, std::uint64_t b = 0) const {
        std::uint64_t k = detail::mix(key_, static_cast<std::uint64_t>(purpose));
        k = detail::mix(k, a + 0x12345678ULL);
        k = detail::mix(k, b + 0x9abcdef0ULL);
        return Rng(k);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Lemire rejection-free-ish bounded draw with widening multiply.
        const std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        std::uint64_t l = static_cast<std::uint64_t>(m);
        if (l < n) {
            const std::uint64_t floor = (0 - n) % n;
            while (l < floor) {
                m = static_cast<__uint128_t>(next_u64()) * n;
                l = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (two uniforms per draw, no cached
    /// spare, so draw counts stay attributable).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Deterministic Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t seed_key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t state_[4] = {};
};

}  // namespace wakelab
