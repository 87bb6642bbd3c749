// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_ALPHABETS_HPP
#define CEDONUT_ALPHABETS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "cedonut/capacity.hpp"
#include "cedonut/doughnut.hpp"
#include "cedonut/error.hpp"
#include "cedonut/numeric.hpp"
#include "cedonut/parallel.hpp"
#include "cedonut/rng.hpp"

namespace cedonut {

/// Discrete-in-amplitude, uniform-in-phase alphabet. Ring l has amplitude
/// m(h) + alpha_l (M(h) - m(h)) and probability probs[l].
class DauipAlphabet {
public:
    explicit DauipAlphabet(std::vector<double> alphas) : DauipAlphabet(alphas, uniform_probs(alphas.size())) {}

    DauipAlphabet(std::vector<double> alphas, std::vector<double> probs)
        : alphas_(std::move(alphas)), probs_(std::move(probs))
    {
        require(!alphas_.empty(), "DAUIP alphabet needs at least one ring");
        require(alphas_.size() == probs_.size(), "DAUIP alphas and probabilities differ in length");
        for (std::size_t l = 0; l < alphas_.size(); ++l) {
            require(alphas_[l] > 0.0 && alphas_[l] <= 1.0, "DAUIP alphas must lie in (0, 1]");
            require(l == 0 || alphas_[l] > alphas_[l - 1], "DAUIP alphas must be strictly increasing");
            require(probs_[l] >= 0.0, "DAUIP probabilities must be nonnegative");
        }
        const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
        require(std::abs(total - 1.0) <= 1e-12, "DAUIP probabilities must sum to 1");
    }

    [[nodiscard]] std::size_t ring_count() const { return alphas_.size(); }
    [[nodiscard]] const std::vector<double>& alphas() const { return alphas_; }
    [[nodiscard]] const std::vector<double>& probs() const { return probs_; }

    [[nodiscard]] double amplitude(const DoughnutRegion& region, std::size_t l) const
    {
        return region.inner + alphas_[l] * (region.outer - region.inner);
    }

private:
    static std::vector<double> uniform_probs(std::size_t count)
    {
        return std::vector<double>(count, count == 0 ? 0.0 : 1.0 / static_cast<double>(count));
    }

    std::vector<double> alphas_;
    std::vector<double> probs_;
};

inline complex sample_symbol(const DauipAlphabet& alphabet, const DoughnutRegion& region, RngStream& stream)
{
    double pick = stream.uniform(0.0, 1.0);
    std::size_t ring = alphabet.ring_count() - 1;
    for (std::size_t l = 0; l < alphabet.ring_count(); ++l) {
        if (pick < alphabet.probs()[l]) {
            ring = l;
            break;
        }
        pick -= alphabet.probs()[l];
    }
    return std::polar(alphabet.amplitude(region, ring), stream.uniform_phase());
}

/// Uniform draw from the doughnut (area measure).
inline complex sample_uniform_doughnut(const DoughnutRegion& region, RngStream& stream)
{
    const double lo2 = region.inner * region.inner;
    const double hi2 = region.outer * region.outer;
    return std::polar(std::sqrt(lo2 + stream.uniform(0.0, 1.0) * (hi2 - lo2)), stream.uniform_phase());
}

enum class MiMethod {
    Quadrature,  // deterministic radial integral of the output entropy
    MonteCarlo,  // sample average of log p(y|u) - log p(y) over input and noise
};

struct MiOptions {
    MiMethod method = MiMethod::Quadrature;
    double panel_width = 1.0;  // radial panel width, in noise standard deviations
    double tail = 9.0;         // integration margin beyond the outermost ring
    /// Quadrature only: estimate the discretization error by repeating at twice
    /// the panel width, reported in stderr_mean.
    bool error_estimate = false;
    std::size_t mc_samples = 20000;
    std::uint64_t mc_seed = 0x5eed;
};

namespace detail {

// Output radial density for rings of radius R_l (in noise units, noise CN(0,1)):
// p(rho) = sum_l p_l exp(-(rho - R_l)^2) I0e(2 rho R_l) / pi.
inline double ring_mixture_density(double rho, std::span<const double> radii, std::span<const double> probs)
{
    double p = 0.0;
    for (std::size_t l = 0; l < radii.size(); ++l) {
        const double d = rho - radii[l];
        p += probs[l] * std::exp(-d * d) * bessel_i0_scaled(2.0 * rho * radii[l]);
    }
    return p / pi;
}

// Uniform-annulus output density as the ring kernel averaged over the annulus
// radius R with weight 2R / (r_out^2 - r_in^2). Used where the chi-squared route
// below overflows.
inline double annulus_density_by_rings(double rho, double r_in, double r_out)
{
    const double lo = std::max(r_in, rho - 9.0);
    const double hi = std::min(r_out, rho + 9.0);
    if (!(hi > lo)) return 0.0;
    auto kernel = [&](double r) {
        const double d = rho - r;
        return 2.0 * r * std::exp(-d * d) * bessel_i0_scaled(2.0 * rho * r);
    };
    return integrate_panels(kernel, lo, hi, 0.5) / (pi * (r_out * r_out - r_in * r_in));
}

// Output radial density for a uniform annulus [r_in, r_out] (noise units):
// p(rho) = P(r_in <= |rho + n| <= r_out) / (pi (r_out^2 - r_in^2)), with
// 2 |rho + n|^2 noncentral chi-squared (2 dof, noncentrality 2 rho^2).
inline double annulus_density(double rho, double r_in, double r_out)
{
    if (rho > 30.0) return annulus_density_by_rings(rho, r_in, r_out);
    try {
        const boost::math::non_central_chi_squared_distribution<double> dist(2.0, 2.0 * rho * rho);
        const double t_in = 2.0 * r_in * r_in;
        const double t_out = 2.0 * r_out * r_out;
        double prob = 0.0;
        if (rho > 0.5 * (r_in + r_out)) {
            prob = boost::math::cdf(dist, t_out) - (t_in > 0.0 ? boost::math::cdf(dist, t_in) : 0.0);
        } else {
            prob = (t_in > 0.0 ? boost::math::cdf(complement(dist, t_in)) : 1.0) -
                   boost::math::cdf(complement(dist, t_out));
        }
        return std::max(prob, 0.0) / (pi * (r_out * r_out - r_in * r_in));
    } catch (const std::exception&) {
        return annulus_density_by_rings(rho, r_in, r_out);
    }
}

// h(y) - log2(pi e) for a circularly symmetric output density.
template <class Density>
double mi_from_radial_density(Density&& density, double r_min, double r_max, double panel_width, double tail)
{
    auto integrand = [&](double rho) {
        const double p = density(rho);
        if (!(p > 0.0)) return 0.0;
        if (!std::isfinite(p)) throw NumericFailure("non-finite output density");
        return -two_pi * rho * p * std::log2(p);
    };
    const double entropy = integrate_panels(integrand, std::max(0.0, r_min - tail), r_max + tail, panel_width);
    return entropy - std::log2(pi * e);
}

template <class Density, class Sampler>
MeanEstimate mi_monte_carlo(Density&& density, Sampler&& sample_radius, const MiOptions& opts)
{
    RngStream stream(opts.mc_seed, 0);
    std::vector<double> terms(opts.mc_samples);
    for (auto& term : terms) {
        const complex z = std::polar(sample_radius(stream), stream.uniform_phase());
        const complex n = stream.complex_normal(1.0);
        const double log_cond = -std::log2(pi) - std::norm(n) * std::log2(e);
        const double p = density(std::abs(z + n));
        if (!(p > 0.0) || !std::isfinite(p)) throw NumericFailure("output density vanished at a sampled point");
        term = log_cond - std::log2(p);
    }
    return mean_and_stderr(terms);
}

template <class Density>
MeanEstimate mi_quadrature(Density&& density, double r_min, double r_max, const MiOptions& opts)
{
    const double value = mi_from_radial_density(density, r_min, r_max, opts.panel_width, opts.tail);
    double error = 0.0;
    if (opts.error_estimate) {
        error = std::abs(value - mi_from_radial_density(density, r_min, r_max, 2.0 * opts.panel_width, opts.tail));
    }
    return {std::max(value, 0.0), error};
}

} // namespace detail

/// Mutual information (bits per channel use) of y = sqrt(snr) u + w, w ~ CN(0,1),
/// with u drawn from the DAUIP rings of `region`.
inline MeanEstimate mutual_info_dauip(const DauipAlphabet& alphabet, const DoughnutRegion& region, SnrPoint snr,
                                      const MiOptions& opts = {})
{
    const double scale = std::sqrt(snr.linear());
    std::vector<double> radii(alphabet.ring_count());
    for (std::size_t l = 0; l < radii.size(); ++l) radii[l] = scale * alphabet.amplitude(region, l);
    const auto& probs = alphabet.probs();
    auto density = [&](double rho) { return detail::ring_mixture_density(rho, radii, probs); };
    if (opts.method == MiMethod::MonteCarlo) {
        auto sample = [&](RngStream& s) {
            double pick = s.uniform(0.0, 1.0);
            for (std::size_t l = 0; l < radii.size(); ++l) {
                if (pick < probs[l]) return radii[l];
                pick -= probs[l];
            }
            return radii.back();
        };
        return detail::mi_monte_carlo(density, sample, opts);
    }
    const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
    return detail::mi_quadrature(density, *lo, *hi, opts);
}

/// Mutual information of the input uniformly distributed on the doughnut. A
/// zero-area region is the single circle of radius M(h).
inline MeanEstimate mutual_info_uniform_doughnut(const DoughnutRegion& region, SnrPoint snr, const MiOptions& opts = {})
{
    if (region.degenerate()) return mutual_info_dauip(DauipAlphabet({1.0}), region, snr, opts);
    const double scale = std::sqrt(snr.linear());
    const double r_in = scale * region.inner;
    const double r_out = scale * region.outer;
    auto density = [&](double rho) { return detail::annulus_density(rho, r_in, r_out); };
    if (opts.method == MiMethod::MonteCarlo) {
        auto sample = [&](RngStream& s) { return std::sqrt(r_in * r_in + s.uniform(0.0, 1.0) * (r_out * r_out - r_in * r_in)); };
        return detail::mi_monte_carlo(density, sample, opts);
    }
    return detail::mi_quadrature(density, r_in, r_out, opts);
}

/// Sample mean (and its standard error) of the DAUIP mutual information over a channel ensemble.
inline MeanEstimate ensemble_mi_dauip(const DauipAlphabet& alphabet, std::span<const DoughnutRegion> regions, SnrPoint snr,
                                      const MiOptions& opts = {})
{
    std::vector<double> values(regions.size());
    parallel_for(regions.size(), [&](std::size_t i) { values[i] = mutual_info_dauip(alphabet, regions[i], snr, opts).mean; });
    return mean_and_stderr(values);
}

inline MeanEstimate ensemble_mi_uniform(std::span<const DoughnutRegion> regions, SnrPoint snr, const MiOptions& opts = {})
{
    std::vector<double> values(regions.size());
    parallel_for(regions.size(), [&](std::size_t i) { values[i] = mutual_info_uniform_doughnut(regions[i], snr, opts).mean; });
    return mean_and_stderr(values);
}

struct DauipSearch {
    std::size_t max_rings = 4;
    /// alpha grid {1/G, 2/G, ..., 1}
    std::size_t alpha_grid = 32;
    /// Ring counts up to this are searched exhaustively over the grid; larger ones
    /// by cyclic coordinate ascent, one alpha at a time.
    std::size_t exhaustive_max_rings = 2;
    /// Sample-mean improvements at or below this are treated as ties.
    double tie_tolerance = 1e-9;
    MiOptions mi{};
};

struct DauipChoice {
    DauipAlphabet alphabet{std::vector<double>{1.0}};
    MeanEstimate mean_mi{};
};

namespace detail {

inline std::vector<double> alpha_values(const std::vector<std::size_t>& idx, std::size_t grid)
{
    std::vector<double> out(idx.size());
    for (std::size_t l = 0; l < idx.size(); ++l) out[l] = static_cast<double>(idx[l] + 1) / static_cast<double>(grid);
    return out;
}

// Enumerates strictly increasing index tuples of length L from [0, grid), the
// outermost ring first so that ties prefer rings nearer M(h).
template <class Visit>
void visit_tuples_from(std::vector<std::size_t>& idx, std::size_t pos, std::size_t upper, Visit& visit)
{
    for (std::size_t v = upper + 1; v-- > pos;) {
        idx[pos] = v;
        if (pos == 0) visit(idx);
        else visit_tuples_from(idx, pos - 1, v - 1, visit);
    }
}

// Enumerates strictly increasing index tuples of length L from [0, grid), the
// outermost ring first so that ties prefer rings nearer M(h).
template <class Visit>
void for_each_increasing_tuple(std::size_t length, std::size_t grid, Visit&& visit)
{
    if (length == 0 || length > grid) return;
    std::vector<std::size_t> idx(length);
    visit_tuples_from(idx, length - 1, grid - 1, visit);
}

} // namespace detail

/// Grid search for the DAUIP alphabet (uniform ring probabilities) maximizing the
/// ensemble-mean mutual information. Ties go to the smaller ring count.
inline DauipChoice optimize_dauip(std::span<const DoughnutRegion> regions, SnrPoint snr, const DauipSearch& search = {})
{
    require(!regions.empty(), "DAUIP optimization needs a nonempty channel ensemble");
    require(search.max_rings >= 1, "DAUIP search needs max_rings >= 1");
    require(search.alpha_grid >= 1, "DAUIP search needs a nonempty alpha grid");

    const std::size_t grid = search.alpha_grid;
    auto evaluate = [&](const std::vector<std::size_t>& idx) {
        return ensemble_mi_dauip(DauipAlphabet(detail::alpha_values(idx, grid)), regions, snr, search.mi);
    };

    std::optional<DauipChoice> best;
    std::vector<std::size_t> best_idx;
    for (std::size_t rings = 1; rings <= std::min(search.max_rings, grid); ++rings) {
        std::vector<std::size_t> level_idx;
        MeanEstimate level_mi{-1.0, 0.0};
        auto consider = [&](const std::vector<std::size_t>& idx) {
            const MeanEstimate mi = evaluate(idx);
            if (level_idx.empty() || mi.mean > level_mi.mean + search.tie_tolerance) {
                level_idx = idx;
                level_mi = mi;
            }
        };
        if (rings <= search.exhaustive_max_rings) {
            detail::for_each_increasing_tuple(rings, grid, consider);
        } else {
            // start from the best smaller alphabet with one more ring squeezed in
            std::vector<std::size_t> idx = best_idx;
            for (std::size_t cand = grid; cand-- > 0 && idx.size() < rings;) {
                if (std::find(idx.begin(), idx.end(), cand) == idx.end()) {
                    idx.push_back(cand);
                    std::sort(idx.begin(), idx.end());
                }
            }
            consider(idx);
            for (bool improved = true; improved;) {
                improved = false;
                for (std::size_t l = 0; l < rings; ++l) {
                    const std::size_t lo = l == 0 ? 0 : level_idx[l - 1] + 1;
                    const std::size_t hi = l + 1 == rings ? grid - 1 : level_idx[l + 1] - 1;
                    for (std::size_t v = hi + 1; v-- > lo;) {
                        if (v == level_idx[l]) continue;
                        auto trial = level_idx;
                        trial[l] = v;
                        const double before = level_mi.mean;
                        consider(trial);
                        if (level_mi.mean > before) improved = true;
                    }
                }
            }
        }
        if (!best || level_mi.mean > best->mean_mi.mean + search.tie_tolerance) {
            best = DauipChoice{DauipAlphabet(detail::alpha_values(level_idx, grid)), level_mi};
            best_idx = level_idx;
        }
    }
    return *best;
}

} // namespace cedonut

#endif // CEDONUT_ALPHABETS_HPP
