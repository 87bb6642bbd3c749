// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_DOUGHNUT_HPP
#define CEDONUT_DOUGHNUT_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cedonut/error.hpp"
#include "cedonut/fading.hpp"
#include "cedonut/phases.hpp"
#include "cedonut/rng.hpp"

namespace cedonut {

/// The annulus {z : inner <= |z| <= outer} of noise-free received values
/// (normalized by sqrt(P_T)) reachable with per-antenna constant envelope.
struct DoughnutRegion {
    double inner = 0.0;
    double outer = 0.0;
    std::size_t n_antennas = 1;

    [[nodiscard]] double area() const { return pi * (outer * outer - inner * inner); }
    [[nodiscard]] bool degenerate() const { return !(outer > inner); }
};

inline bool contains(const DoughnutRegion& region, complex u, double tolerance = 0.0)
{
    const double r = std::abs(u);
    return r >= region.inner - tolerance && r <= region.outer + tolerance;
}

/// M(h) = ||h||_1 / sqrt(N).
inline double outer_radius(const ChannelVector& h)
{
    return h.norm_l1() / std::sqrt(static_cast<double>(h.size()));
}

/// Phases theta_i = -arg(h_i) that align every term and attain M(h).
inline PhaseVector outer_radius_phases(const ChannelVector& h)
{
    std::vector<double> angles(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) angles[i] = -std::arg(h[i]);
    return PhaseVector(std::move(angles));
}

struct InnerRadiusOptions {
    int random_restarts = 8;
    int max_sweeps = 500;
    double improvement_tolerance = 1e-12;
};

struct InnerRadiusResult {
    double value = 0.0;
    PhaseVector phases;
    bool converged = true;
    int sweeps = 0;
};

namespace detail {

// Stable 64-bit fingerprint of the gains, used to seed restarts deterministically.
inline std::uint64_t channel_fingerprint(const ChannelVector& h)
{
    std::uint64_t acc = 0x243F6A8885A308D3ULL ^ h.size();
    for (const auto& g : h.gains()) {
        acc = splitmix64(acc ^ std::bit_cast<std::uint64_t>(g.real()));
        acc = splitmix64(acc ^ std::bit_cast<std::uint64_t>(g.imag()));
    }
    return acc;
}

// Alternating-sign construction over magnitudes sorted in decreasing order; the
// resulting modulus never exceeds ||h||_inf.
inline PhaseVector alternating_sign_phases(const ChannelVector& h)
{
    std::vector<std::size_t> order(h.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(h[a]) > std::abs(h[b]); });
    PhaseVector phases(h.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        phases.set(i, k % 2 == 0 ? -std::arg(h[i]) : -(std::arg(h[i]) + pi));
    }
    return phases;
}

struct DescentOutcome {
    double modulus;  // |sum h_i e^{j theta_i}|, unnormalized
    bool converged;
    int sweeps;
};

// Cyclic coordinate descent on |sum h_i e^{j theta_i}|: each update turns one
// term antiparallel to the sum of the others.
inline DescentOutcome minimize_modulus(const ChannelVector& h, PhaseVector& phases, const InnerRadiusOptions& opts)
{
    const double scale = std::max(1.0, h.norm_l1());
    double value = std::abs(phased_sum(h, phases));
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        complex sum = phased_sum(h, phases);
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] == complex{}) continue;
            const complex rest = sum - h[i] * std::polar(1.0, phases[i]);
            if (rest == complex{}) continue;
            phases.set(i, std::arg(-rest) - std::arg(h[i]));
            sum = rest + h[i] * std::polar(1.0, phases[i]);
        }
        const double next = std::abs(phased_sum(h, phases));
        const double improvement = value - next;
        value = std::min(value, next);
        if (improvement < opts.improvement_tolerance * scale) return {value, true, sweep};
    }
    return {value, false, opts.max_sweeps};
}

} // namespace detail

/// m(h): smallest |sum_i h_i e^{j theta_i}| / sqrt(N) found by coordinate descent
/// from the alternating-sign start plus seeded random restarts. Returns the best
/// value with its witness phases; `converged` is false if any start hit the sweep cap.
inline InnerRadiusResult inner_radius(const ChannelVector& h, const InnerRadiusOptions& opts = {})
{
    const double norm = std::sqrt(static_cast<double>(h.size()));
    InnerRadiusResult best;
    if (h.size() == 1) {
        best.value = std::abs(h[0]);
        best.phases = outer_radius_phases(h);
        return best;
    }
    const double floor = 1e-14 * std::max(1.0, h.norm_l1());

    best.phases = detail::alternating_sign_phases(h);
    auto first = detail::minimize_modulus(h, best.phases, opts);
    best.value = first.modulus / norm;
    best.converged = first.converged;
    best.sweeps = first.sweeps;

    const std::uint64_t seed = detail::channel_fingerprint(h);
    for (int r = 0; r < opts.random_restarts && best.value * norm > floor; ++r) {
        RngStream stream(seed, static_cast<std::uint64_t>(r));
        std::vector<double> start(h.size());
        for (auto& a : start) a = stream.uniform_phase();
        PhaseVector phases(std::move(start));
        auto outcome = detail::minimize_modulus(h, phases, opts);
        best.sweeps += outcome.sweeps;
        best.converged = best.converged && outcome.converged;
        if (outcome.modulus / norm < best.value) {
            best.value = outcome.modulus / norm;
            best.phases = std::move(phases);
        }
    }
    return best;
}

/// Grid-search oracle for m(h): theta_1 fixed at 0 (rotation invariance), every
/// other phase on `grid_points_per_angle` uniform points. Over-estimates m(h) by at
/// most grid_error(h, grid).
inline double inner_radius_bruteforce(const ChannelVector& h, int grid_points_per_angle,
                                      double evaluation_budget = 2e9)
{
    const std::size_t n = h.size();
    require(grid_points_per_angle >= 1, "grid must have at least one point per angle");
    require(n <= 6, "brute-force inner radius supports at most 6 antennas");
    const double evaluations = std::pow(static_cast<double>(grid_points_per_angle), static_cast<double>(n - 1));
    require(evaluations <= evaluation_budget, "brute-force grid exceeds the evaluation budget");

    std::vector<complex> rotor(static_cast<std::size_t>(grid_points_per_angle));
    for (int g = 0; g < grid_points_per_angle; ++g) rotor[static_cast<std::size_t>(g)] = std::polar(1.0, two_pi * g / grid_points_per_angle);

    double best_sq = std::norm(h[0]) + h.norm_l1() * h.norm_l1();
    // depth-first enumeration with running partial sums
    auto recurse = [&](auto&& self, std::size_t i, complex partial) -> void {
        if (i == n) {
            best_sq = std::min(best_sq, std::norm(partial));
            return;
        }
        for (const auto& r : rotor) self(self, i + 1, partial + h[i] * r);
    };
    recurse(recurse, 1, h[0]);
    return std::sqrt(best_sq / static_cast<double>(n));
}

/// Worst-case over-estimate of the brute-force grid: ||h||_1 pi / (grid sqrt(N)).
inline double bruteforce_grid_error(const ChannelVector& h, int grid_points_per_angle)
{
    return h.norm_l1() * pi / (grid_points_per_angle * std::sqrt(static_cast<double>(h.size())));
}

inline double closed_form_inner_n2(const ChannelVector& h)
{
    require(h.size() == 2, "closed-form inner radius (N=2) needs exactly 2 antennas");
    return std::abs(std::abs(h[0]) - std::abs(h[1])) / std::sqrt(2.0);
}

inline double closed_form_inner_n3(const ChannelVector& h)
{
    require(h.size() == 3, "closed-form inner radius (N=3) needs exactly 3 antennas");
    const double a1 = std::abs(h[0]), a2 = std::abs(h[1]), a3 = std::abs(h[2]);
    const double diff = std::abs(a1 - a2);
    const double sum = a1 + a2;
    if (a3 <= diff) return (diff - a3) / std::sqrt(3.0);
    if (a3 >= sum) return (a3 - sum) / std::sqrt(3.0);
    return 0.0;
}

/// Both radii of the doughnut for channel h.
inline DoughnutRegion make_region(const ChannelVector& h, const InnerRadiusOptions& opts = {})
{
    return {inner_radius(h, opts).value, outer_radius(h), h.size()};
}

} // namespace cedonut

#endif // CEDONUT_DOUGHNUT_HPP
