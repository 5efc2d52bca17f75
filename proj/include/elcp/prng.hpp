#pragma once

// Counter-seeded splitmix64 streams. Every consumer derives its stream seed
// from (master_seed, stream_index), so replicate r sees the same draws no
// matter how many workers run or in which order replicates execute.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace elcp {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream seed for replicate `stream` of a run keyed by `master`.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

// Reserved stream index for the fixed design draw (replicates use 0,1,2,...).
inline constexpr std::uint64_t kDesignStream = 1ULL << 63;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the sine draw is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    double normal(double variance) { return std::sqrt(variance) * normal(); }

    // Exp(rate) shifted to mean zero: (E - 1) / rate with E standard exponential.
    double centered_exponential(double rate) {
        const double u = 1.0 - uniform();
        return (-std::log(u) - 1.0) / rate;
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace elcp
