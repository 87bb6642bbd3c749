// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_PHASES_HPP
#define CEDONUT_PHASES_HPP

#include <cstddef>
#include <vector>

#include "cedonut/fading.hpp"
#include "cedonut/numeric.hpp"

namespace cedonut {

/// Per-antenna transmit phases, every entry kept in [-pi, pi).
class PhaseVector {
public:
    PhaseVector() = default;
    explicit PhaseVector(std::size_t n) : angles_(n, 0.0) {}
    explicit PhaseVector(std::vector<double> angles) : angles_(std::move(angles))
    {
        for (auto& a : angles_) a = wrap_angle(a);
    }

    [[nodiscard]] std::size_t size() const { return angles_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return angles_[i]; }
    void set(std::size_t i, double angle) { angles_[i] = wrap_angle(angle); }
    [[nodiscard]] const std::vector<double>& angles() const { return angles_; }

    /// Adds a common rotation to every phase.
    [[nodiscard]] PhaseVector rotated(double phi) const
    {
        PhaseVector out(*this);
        for (auto& a : out.angles_) a = wrap_angle(a + phi);
        return out;
    }

private:
    std::vector<double> angles_;
};

/// Unnormalized sum  sum_i h_i exp(j theta_i).
inline complex phased_sum(const ChannelVector& h, const PhaseVector& phases)
{
    complex s{0.0, 0.0};
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * std::polar(1.0, phases[i]);
    return s;
}

/// Noise-free received value per unit sqrt(P_T):  sum_i h_i exp(j theta_i) / sqrt(N).
inline complex received_symbol(const ChannelVector& h, const PhaseVector& phases)
{
    return phased_sum(h, phases) / std::sqrt(static_cast<double>(h.size()));
}

/// |u - sum_i h_i exp(j theta_i) / sqrt(N)|, recomputed from scratch.
inline double precoding_residual(const ChannelVector& h, const PhaseVector& phases, complex target)
{
    return std::abs(target - received_symbol(h, phases));
}

} // namespace cedonut

#endif // CEDONUT_PHASES_HPP
