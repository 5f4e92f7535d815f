#pragma once

// Counter-based random numbers (Philox4x32-10).
//
// Every random draw in this project is addressed, not streamed: a draw is a
// pure function of (seed, stream, counter). That makes ensembles
// scheduling-independent and runs bit-reproducible across platforms. Distinct
// noise sources (shift process, particle noise, initial data) use distinct
// stream ids so they are uncorrelated by construction.
//
// Realization seeds are derived as split_seed(base_seed, realization_index) =
// splitmix64(base_seed XOR realization_index).

#include <array>
#include <cmath>
#include <cstdint>

namespace mixlab {

namespace rng_stream {
inline constexpr std::uint32_t shift = 1;      // torus Brownian shift
inline constexpr std::uint32_t particle = 2;   // Lagrangian kappa-noise
inline constexpr std::uint32_t initial = 3;    // random initial data
inline constexpr std::uint32_t sampling = 4;   // generic test sampling
inline constexpr std::uint32_t forcing = 5;    // stochastic forcing
}  // namespace rng_stream

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    constexpr std::uint64_t m0 = 0xD2511F53ull;
    constexpr std::uint64_t m1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = m0 * ctr[0];
    const std::uint64_t p1 = m1 * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
}

}  // namespace detail

/// Philox4x32-10: 128-bit counter, 64-bit key, 128 bits out.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::uint64_t key64) {
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key64),
                                        static_cast<std::uint32_t>(key64 >> 32)};
    for (int round = 0; round < 10; ++round) {
        detail::philox_round(counter, key);
    }
    return counter;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for realization `index` of an ensemble keyed by `base_seed`.
inline std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(base_seed ^ index);
}

/// Standard-normal pairs addressed by (seed, stream, index), via Box-Muller
/// on Philox output. Uniforms are mapped to (0,1] so the log is finite.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

    /// Two independent N(0,1) draws for counter value `index`.
    std::array<double, 2> pair(std::uint64_t index) const {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(index),
            static_cast<std::uint32_t>(index >> 32),
            stream_,
            0u,
        };
        const auto r = philox4x32(ctr, seed_);
        const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
        // 53-bit mantissas; +1 keeps u1 strictly positive.
        const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        return {rad * std::cos(ang), rad * std::sin(ang)};
    }

    /// Single uniform in [0,1) for counter value `index`.
    double uniform(std::uint64_t index) const {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(index),
            static_cast<std::uint32_t>(index >> 32),
            stream_,
            0x5eedu,
        };
        const auto r = philox4x32(ctr, seed_);
        const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
        return static_cast<double>(a >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint32_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint32_t stream_;
};

}  // namespace mixlab
