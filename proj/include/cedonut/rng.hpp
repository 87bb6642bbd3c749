// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_RNG_HPP
#define CEDONUT_RNG_HPP

#include <cstdint>
#include <random>

#include "cedonut/numeric.hpp"

namespace cedonut {

/// SplitMix64 finalizer, used to decorrelate (seed, index) pairs.
inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index)
{
    return splitmix64(master_seed ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

/// Independent random stream for one Monte-Carlo trial. Value type: copy or move
/// it into a worker; two streams built from the same (seed, index) produce the
/// same sequence regardless of which thread consumes them.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t index)
        : engine_(derive_seed(master_seed, index)) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double uniform_phase() { return uniform(-pi, pi); }
    double standard_normal() { return normal_(engine_); }
    double exponential(double mean = 1.0) { return std::exponential_distribution<double>(1.0 / mean)(engine_); }
    std::uint64_t next_u64() { return engine_(); }

    /// Circularly symmetric CN(0, variance).
    complex complex_normal(double variance = 1.0)
    {
        const double s = std::sqrt(variance / 2.0);
        const double re = standard_normal();
        const double im = standard_normal();
        return {s * re, s * im};
    }

    std::size_t index_below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace cedonut

#endif // CEDONUT_RNG_HPP
