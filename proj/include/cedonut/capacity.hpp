// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_CAPACITY_HPP
#define CEDONUT_CAPACITY_HPP

#include <algorithm>
#include <cmath>

#include "cedonut/doughnut.hpp"
#include "cedonut/error.hpp"
#include "cedonut/numeric.hpp"

namespace cedonut {

/// Transmit SNR P_T / sigma^2 as a linear power ratio.
class SnrPoint {
public:
    explicit SnrPoint(double linear) : linear_(linear)
    {
        require(std::isfinite(linear) && linear > 0.0, "SNR must be a positive finite linear ratio");
    }
    static SnrPoint from_db(double db) { return SnrPoint(db_to_linear(db)); }

    [[nodiscard]] double linear() const { return linear_; }
    [[nodiscard]] double db() const { return linear_to_db(linear_); }

private:
    double linear_;
};

/// All rates in bits per channel use.
struct RateBounds {
    double epi_lower = 0.0;
    double kl_upper_i1 = 0.0;
    double papc = 0.0;
    double combined_upper_i2 = 0.0;
    double atpc = 0.0;
    bool degenerate = false;  // M(h) <= m(h): the EPI bound is vacuous
};

struct EpiBound {
    double rate = 0.0;
    bool degenerate = false;
};

/// Uniform-in-doughnut achievable rate via the entropy power inequality:
/// log2(1 + snr (M^2 - m^2) / e). A zero-area region yields 0 with `degenerate` set.
inline EpiBound epi_lower_bound(const DoughnutRegion& region, SnrPoint snr)
{
    if (region.outer <= region.inner) return {0.0, true};
    const double area = region.outer * region.outer - region.inner * region.inner;
    return {std::log2(1.0 + snr.linear() * area / e), false};
}

/// Upper bound from a reference density 2 beta exp(-pi^3 beta^2 |z|^4), before
/// minimizing over beta.
inline double kl_upper_bound_beta(const DoughnutRegion& region, SnrPoint snr, double beta)
{
    require(beta > 0.0, "beta must be positive");
    const double s = snr.linear();
    const double m2 = region.outer * region.outer;
    const double moment = m2 * m2 + 4.0 * m2 / s + 2.0 / (s * s);
    return -std::log2(2.0 * beta) + pi * pi * pi * beta * beta * moment * std::log2(e) - std::log2(pi * e / s);
}

/// The beta-minimized bound I1 = 1/2 log2(pi / 2e) + 1/2 log2(M^4 snr^2 + 4 M^2 snr + 2).
inline double kl_upper_bound_i1(const DoughnutRegion& region, SnrPoint snr)
{
    const double x = snr.linear() * region.outer * region.outer;
    return 0.5 * std::log2(pi / (2.0 * e)) + 0.5 * std::log2(x * x + 4.0 * x + 2.0);
}

/// Looser simplification 1/2 log2(2 pi / e) + log2(1 + snr M^2 / 2) >= I1.
inline double kl_upper_bound_i1_loose(const DoughnutRegion& region, SnrPoint snr)
{
    return 0.5 * std::log2(2.0 * pi / e) + std::log2(1.0 + snr.linear() * region.outer * region.outer / 2.0);
}

inline double papc_capacity(const DoughnutRegion& region, SnrPoint snr)
{
    return std::log2(1.0 + snr.linear() * region.outer * region.outer);
}

inline double atpc_capacity(const ChannelVector& h, SnrPoint snr)
{
    return std::log2(1.0 + snr.linear() * h.norm_l2_squared());
}

inline double combined_upper_bound_i2(const DoughnutRegion& region, SnrPoint snr)
{
    return std::min(kl_upper_bound_i1(region, snr), papc_capacity(region, snr));
}

inline RateBounds rate_bounds(const ChannelVector& h, const DoughnutRegion& region, SnrPoint snr)
{
    RateBounds out;
    const auto epi = epi_lower_bound(region, snr);
    out.epi_lower = epi.rate;
    out.degenerate = epi.degenerate;
    out.kl_upper_i1 = kl_upper_bound_i1(region, snr);
    out.papc = papc_capacity(region, snr);
    out.combined_upper_i2 = std::min(out.kl_upper_i1, out.papc);
    out.atpc = atpc_capacity(h, snr);
    return out;
}

/// kappa = (M^2 - m^2) / (e ||h||_2^2), with m(h) supplied by the caller.
inline double kappa(const ChannelVector& h, double inner)
{
    require(inner >= 0.0, "inner radius must be nonnegative");
    const double outer = outer_radius(h);
    const double energy = h.norm_l2_squared();
    require(energy > 0.0, "kappa needs a nonzero channel");
    return (outer * outer - inner * inner) / (e * energy);
}

enum class SnrRegime { Low, High };

struct PowerGapBounds {
    double lower_db = 0.0;
    double upper_db = 0.0;
};

/// CE-vs-MRT power gap for one channel realization, in dB. At low SNR the gap is
/// ||h||^2 / M^2 (lower = upper). At high SNR it lies in [2 ||h||^2 / M^2, 1 / kappa].
inline PowerGapBounds power_gap_bounds(const ChannelVector& h, double inner, SnrRegime regime)
{
    const double outer = outer_radius(h);
    require(outer > 0.0, "power gap needs a nonzero channel");
    const double ratio = h.norm_l2_squared() / (outer * outer);
    if (regime == SnrRegime::Low) {
        const double db = linear_to_db(ratio);
        return {db, db};
    }
    return {linear_to_db(2.0 * ratio), linear_to_db(1.0 / kappa(h, inner))};
}

/// Lower bound 1 - log2(1 / kappa) / C_ATPC on C_donut / C_ATPC at high SNR.
inline double capacity_ratio_bound(const ChannelVector& h, double inner, SnrPoint snr)
{
    const double c_atpc = atpc_capacity(h, snr);
    require(c_atpc > 0.0, "capacity ratio needs C_ATPC > 0");
    return 1.0 - std::log2(1.0 / kappa(h, inner)) / c_atpc;
}

/// Low-SNR ratio C_donut / C_ATPC ~= M^2 / ||h||^2.
inline double low_snr_capacity_ratio(const ChannelVector& h)
{
    const double outer = outer_radius(h);
    return outer * outer / h.norm_l2_squared();
}

struct EfficiencyGain {
    double linear = 0.0;
    double db = 0.0;
};

/// rho = (PAE_nonlinear / PAE_linear) / gap, the net power-efficiency gain of
/// nonlinear CE amplification over linear amplification with MRT.
inline EfficiencyGain efficiency_gain_rho(double pae_nonlinear, double pae_linear, double gap_db)
{
    require(pae_nonlinear > 0.0 && pae_nonlinear <= 1.0, "nonlinear PAE must lie in (0, 1]");
    require(pae_linear > 0.0 && pae_linear <= 1.0, "linear PAE must lie in (0, 1]");
    require(std::isfinite(gap_db), "power gap must be finite");
    const double rho = (pae_nonlinear / pae_linear) / db_to_linear(gap_db);
    return {rho, linear_to_db(rho)};
}

} // namespace cedonut

#endif // CEDONUT_CAPACITY_HPP
