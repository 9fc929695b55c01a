#pragma once

#include <cmath>
#include <cstdint>

namespace pointmotion {

/// Deterministic counter-based generator (splitmix64). The state advances by
/// a fixed increment per draw, so a given (seed, draw index) always yields
/// the same value on every platform. Callers document their stream order;
/// the cloud sampler draws bone-major, then point, then axis.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; used where log() must stay finite.
    double uniform_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Always consumes exactly two draws, so
    /// the stream position stays a pure function of the call count.
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        constexpr double kTwoPi = 6.28318530717958647692;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
};

}  // namespace pointmotion
