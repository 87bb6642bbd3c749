// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_PRECODER_HPP
#define CEDONUT_PRECODER_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cedonut/doughnut.hpp"
#include "cedonut/error.hpp"
#include "cedonut/phases.hpp"
#include "cedonut/rng.hpp"

namespace cedonut {

enum class SolverKind { Homotopy, CoordDescent, DfsTwoStep, ClosedFormN2, ClosedFormN3 };

enum class SolveStatus {
    Converged,
    LocalMinimum,     // coordinate descent stalled above epsilon_solve
    SearchExhausted,  // DFS ran out of discretized branches or node budget
    BracketFailure,   // homotopy found no sign change of f(t) - |u|^2
};

inline const char* to_string(SolverKind kind)
{
    switch (kind) {
    case SolverKind::Homotopy: return "homotopy";
    case SolverKind::CoordDescent: return "coord-descent";
    case SolverKind::DfsTwoStep: return "dfs-two-step";
    case SolverKind::ClosedFormN2: return "closed-form-n2";
    case SolverKind::ClosedFormN3: return "closed-form-n3";
    }
    return "unknown";
}

inline const char* to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::LocalMinimum: return "local-minimum";
    case SolveStatus::SearchExhausted: return "search-exhausted";
    case SolveStatus::BracketFailure: return "bracket-failure";
    }
    return "unknown";
}

struct SolverOptions {
    /// Acceptance threshold on the residual, relative to M(h).
    double epsilon_solve = 1e-9;
    /// Slack (relative to M(h)) when deciding whether u lies in the doughnut.
    double region_tolerance = 1e-9;

    int max_sweeps = 5000;

    int scan_points = 256;
    int bisection_steps = 64;
    int dense_scan_points = 8192;

    int dfs_grid = 64;
    /// Number of phases fixed by the search before polishing; 0 means N - 1.
    int dfs_depth = 0;
    /// Seed acceptance threshold, relative to M(h).
    double dfs_threshold = 0.05;
    long dfs_node_budget = 200000;

    InnerRadiusOptions inner{};
};

struct PhaseSolution {
    PhaseVector phases;
    complex target{};
    double residual = 0.0;
    SolverKind solver = SolverKind::Homotopy;
    int iterations = 0;
    SolveStatus status = SolveStatus::Converged;
    bool accepted = false;
};

namespace detail {

inline double acceptance_threshold(const ChannelVector& h, const SolverOptions& opts)
{
    return opts.epsilon_solve * outer_radius(h);
}

inline PhaseSolution finish(const ChannelVector& h, PhaseVector phases, complex u, SolverKind kind, int iterations,
                            const SolverOptions& opts, SolveStatus status = SolveStatus::Converged)
{
    PhaseSolution out;
    out.residual = precoding_residual(h, phases, u);
    out.phases = std::move(phases);
    out.target = u;
    out.solver = kind;
    out.iterations = iterations;
    out.accepted = out.residual <= acceptance_threshold(h, opts);
    out.status = out.accepted ? SolveStatus::Converged : status;
    if (!out.accepted && status == SolveStatus::Converged) out.status = SolveStatus::LocalMinimum;
    return out;
}

inline void check_in_region(const DoughnutRegion& region, complex u, const SolverOptions& opts)
{
    const double tol = opts.region_tolerance * std::max(region.outer, 1e-300);
    if (!contains(region, u, tol)) {
        throw TargetOutsideDoughnut("|u| = " + std::to_string(std::abs(u)) + " is outside the doughnut [" +
                                    std::to_string(region.inner) + ", " + std::to_string(region.outer) + "]");
    }
}

// acos with a small slack for rounding; nullopt when the argument is genuinely out of range.
inline std::optional<double> safe_acos(double c, double slack = 1e-12)
{
    if (!std::isfinite(c) || c > 1.0 + slack || c < -1.0 - slack) return std::nullopt;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Coordinate descent
// ---------------------------------------------------------------------------

struct DescentReport {
    int sweeps = 0;
    bool reached_target = false;
};

/// Cyclic coordinate descent on e(theta) = |u - sum h_i e^{j theta_i} / sqrt(N)|^2,
/// in place. Each update points h_i e^{j theta_i} along the residual left by the
/// other antennas, the exact one-dimensional minimizer, so the objective never
/// increases. When `trace` is non-null the objective after every update is appended.
inline DescentReport refine_coord_descent(const ChannelVector& h, complex u, PhaseVector& phases,
                                          const SolverOptions& opts, std::vector<double>* trace = nullptr)
{
    const double root_n = std::sqrt(static_cast<double>(h.size()));
    const complex target = u * root_n;
    // half the acceptance threshold, so the independent residual recomputation stays below it
    const double goal = 0.5 * detail::acceptance_threshold(h, opts) * root_n;
    const double stall = 1e-15 * std::max(1.0, h.norm_l1());

    DescentReport report;
    complex sum = phased_sum(h, phases);
    double error = std::abs(target - sum);
    if (trace) trace->push_back(error * error / static_cast<double>(h.size()));
    if (error <= goal) {
        report.reached_target = true;
        return report;
    }
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        report.sweeps = sweep;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] == complex{}) continue;
            const complex rest = sum - h[i] * std::polar(1.0, phases[i]);
            const complex pull = target - rest;
            if (pull == complex{}) continue;
            phases.set(i, std::arg(pull) - std::arg(h[i]));
            sum = rest + h[i] * std::polar(1.0, phases[i]);
            if (trace) trace->push_back(std::norm(target - sum) / static_cast<double>(h.size()));
        }
        sum = phased_sum(h, phases);
        const double next = std::abs(target - sum);
        const double improvement = error - next;
        error = next;
        if (error <= goal) {
            report.reached_target = true;
            return report;
        }
        if (improvement < stall) break;
    }
    return report;
}

/// Coordinate-descent precoder. The start is pseudo-random, seeded from (h, u), so
/// repeated calls agree; for N = 1 the first update is already exact. The MRT
/// alignment is not used as a start because it is a stationary point whenever
/// |u| < M(h). Does not require u to be verified inside the doughnut; a stall above
/// epsilon_solve is reported as LocalMinimum.
inline PhaseSolution solve_coord_descent(const ChannelVector& h, complex u, const SolverOptions& opts = {},
                                         std::vector<double>* trace = nullptr)
{
    std::uint64_t seed = detail::channel_fingerprint(h);
    seed = splitmix64(seed ^ std::bit_cast<std::uint64_t>(u.real()));
    seed = splitmix64(seed ^ std::bit_cast<std::uint64_t>(u.imag()));
    RngStream stream(seed, 0);
    std::vector<double> start(h.size());
    for (auto& angle : start) angle = stream.uniform_phase();
    PhaseVector phases(std::move(start));
    const auto report = refine_coord_descent(h, u, phases, opts, trace);
    return detail::finish(h, std::move(phases), u, SolverKind::CoordDescent, report.sweeps, opts,
                          SolveStatus::LocalMinimum);
}

// ---------------------------------------------------------------------------
// Homotopy between the inner-radius witness and the MRT alignment
// ---------------------------------------------------------------------------

/// Phases theta_i(t) = (1 - t) theta*_i - t arg(h_i) on the path from the m(h)
/// witness (t = 0) to the M(h) alignment (t = 1).
inline PhaseVector homotopy_phases(const ChannelVector& h, const PhaseVector& witness, double t)
{
    std::vector<double> angles(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) angles[i] = (1.0 - t) * witness[i] - t * std::arg(h[i]);
    return PhaseVector(std::move(angles));
}

/// f(t) = |sum h_i e^{j theta_i(t)}|^2 / N.
inline double homotopy_objective(const ChannelVector& h, const PhaseVector& witness, double t)
{
    double raw_angle_sum_re = 0.0, raw_angle_sum_im = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const complex term = h[i] * std::polar(1.0, (1.0 - t) * witness[i] - t * std::arg(h[i]));
        raw_angle_sum_re += term.real();
        raw_angle_sum_im += term.imag();
    }
    return (raw_angle_sum_re * raw_angle_sum_re + raw_angle_sum_im * raw_angle_sum_im) / static_cast<double>(h.size());
}

/// Homotopy precoder with a caller-supplied inner-radius witness.
inline PhaseSolution solve_homotopy(const ChannelVector& h, complex u, const InnerRadiusResult& witness,
                                    const SolverOptions& opts = {})
{
    const DoughnutRegion region{witness.value, outer_radius(h), h.size()};
    detail::check_in_region(region, u, opts);

    const double goal = std::norm(u);
    auto g = [&](double t) { return homotopy_objective(h, witness.phases, t) - goal; };
    int evaluations = 0;

    // Bracket a sign change of g on a uniform scan, then bisect.
    auto find_bracket = [&](int points, double& lo, double& hi) {
        double t_prev = 0.0;
        double g_prev = g(0.0);
        ++evaluations;
        if (g_prev >= 0.0) {
            lo = hi = 0.0;
            return true;
        }
        for (int k = 1; k <= points; ++k) {
            const double t = static_cast<double>(k) / points;
            const double gt = g(t);
            ++evaluations;
            if (gt >= 0.0) {
                lo = t_prev;
                hi = t;
                return true;
            }
            t_prev = t;
            g_prev = gt;
        }
        return false;
    };

    double lo = 0.0, hi = 1.0;
    SolveStatus status = SolveStatus::Converged;
    bool bracketed = find_bracket(opts.scan_points, lo, hi) || find_bracket(opts.dense_scan_points, lo, hi);
    double t_root = 0.0;
    if (bracketed) {
        for (int step = 0; step < opts.bisection_steps && hi - lo > 0.0; ++step) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (g(mid) >= 0.0) hi = mid; else lo = mid;
            ++evaluations;
        }
        t_root = std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
    } else {
        // |u| sits marginally outside the sampled range of f: take the closest sample.
        status = SolveStatus::BracketFailure;
        double best = std::abs(g(0.0));
        for (int k = 1; k <= opts.dense_scan_points; ++k) {
            const double t = static_cast<double>(k) / opts.dense_scan_points;
            if (const double v = std::abs(g(t)); v < best) {
                best = v;
                t_root = t;
            }
        }
    }

    PhaseVector phases = homotopy_phases(h, witness.phases, t_root);
    const complex reached = received_symbol(h, phases);
    double phi = 0.0;
    if (std::abs(reached) > 0.0 && std::abs(u) > 0.0) phi = std::arg(u) - std::arg(reached);
    return detail::finish(h, phases.rotated(phi), u, SolverKind::Homotopy, evaluations, opts, status);
}

inline PhaseSolution solve_homotopy(const ChannelVector& h, complex u, const SolverOptions& opts = {})
{
    return solve_homotopy(h, u, inner_radius(h, opts.inner), opts);
}

// ---------------------------------------------------------------------------
// Closed forms for N = 2 and N = 3
// ---------------------------------------------------------------------------

/// Both N = 2 solutions (the two branches of acos), branch 0 taking +acos.
inline std::array<PhaseSolution, 2> solve_closed_form_n2_branches(const ChannelVector& h, complex u,
                                                                   const SolverOptions& opts = {})
{
    require(h.size() == 2, "closed-form N=2 precoder needs exactly 2 antennas");
    const DoughnutRegion region{closed_form_inner_n2(h), outer_radius(h), 2};
    detail::check_in_region(region, u, opts);

    const double a1 = std::abs(h[0]), a2 = std::abs(h[1]), r = std::abs(u);
    const double sqrt2 = std::sqrt(2.0);
    std::array<PhaseSolution, 2> out;
    for (int branch = 0; branch < 2; ++branch) {
        double theta2 = 0.0;
        if (r > 0.0 && a2 > 0.0) {
            const double c = (r * r + a2 * a2 / 2.0 - a1 * a1 / 2.0) / (sqrt2 * r * a2);
            const auto angle = detail::safe_acos(c, 1e-12 + opts.region_tolerance);
            if (!angle) throw TargetOutsideDoughnut("acos argument out of range in N=2 closed form");
            theta2 = (branch == 0 ? *angle : -*angle) + std::arg(u) - std::arg(h[1]);
        }
        const complex left = sqrt2 * u - h[1] * std::polar(1.0, theta2);
        const double theta1 = std::arg(left) - std::arg(h[0]);
        out[static_cast<std::size_t>(branch)] =
            detail::finish(h, PhaseVector(std::vector<double>{theta1, theta2}), u, SolverKind::ClosedFormN2, 1, opts);
    }
    return out;
}

inline PhaseSolution solve_closed_form_n2(const ChannelVector& h, complex u, const SolverOptions& opts = {})
{
    auto both = solve_closed_form_n2_branches(h, u, opts);
    return both[0].residual <= both[1].residual ? both[0] : both[1];
}

/// N = 3: theta_3 is taken at the midpoint of its admissible cosine interval, then
/// the remaining pair is solved with the N = 2 formula.
inline PhaseSolution solve_closed_form_n3(const ChannelVector& h, complex u, const SolverOptions& opts = {})
{
    require(h.size() == 3, "closed-form N=3 precoder needs exactly 3 antennas");
    const DoughnutRegion region{closed_form_inner_n3(h), outer_radius(h), 3};
    detail::check_in_region(region, u, opts);

    const double a1 = std::abs(h[0]), a2 = std::abs(h[1]), a3 = std::abs(h[2]), r = std::abs(u);
    const double sqrt3 = std::sqrt(3.0);
    double theta3 = 0.0;
    if (r > 0.0 && a3 > 0.0) {
        const double denom = 2.0 * sqrt3 * r * a3;
        const double sum = a1 + a2, diff = a1 - a2;
        double lo = (3.0 * r * r + a3 * a3 - sum * sum) / denom;
        double hi = (3.0 * r * r + a3 * a3 - diff * diff) / denom;
        const double slack = 1e-12 + 4.0 * opts.region_tolerance;
        lo = std::max(lo, -1.0);
        hi = std::min(hi, 1.0);
        if (lo > hi + slack) throw TargetOutsideDoughnut("no admissible theta_3 in N=3 closed form");
        const double mid = std::clamp(0.5 * (lo + hi), -1.0, 1.0);
        theta3 = std::acos(mid) + std::arg(u) - std::arg(h[2]);
    }
    const complex u1 = std::sqrt(1.5) * (u - h[2] * std::polar(1.0, theta3) / sqrt3);
    const ChannelVector pair(std::vector<complex>{h[0], h[1]});
    // u1 is feasible for the pair by construction; allow the pair solve a little extra slack
    SolverOptions pair_opts = opts;
    pair_opts.region_tolerance = std::max(opts.region_tolerance, 1e-9);
    const auto inner = solve_closed_form_n2(pair, u1, pair_opts);
    PhaseVector phases(std::vector<double>{inner.phases[0], inner.phases[1], theta3});
    return detail::finish(h, std::move(phases), u, SolverKind::ClosedFormN3, 1, opts);
}

// ---------------------------------------------------------------------------
// Depth-first search seed + coordinate-descent polish
// ---------------------------------------------------------------------------

/// A closed arc of angles [start, start + width] (radians, width in [0, 2 pi]).
struct AngleArc {
    double start = 0.0;
    double width = 0.0;
};

/// Angles theta for which lo <= |c - a e^{j(theta + arg_h)}| <= hi, as at most two arcs.
/// A zero-width arc is a single admissible angle.
inline std::vector<AngleArc> admissible_arcs(complex c, double a, double arg_h, double lo, double hi,
                                             double slack = 1e-12)
{
    std::vector<AngleArc> arcs;
    const double d = std::abs(c);
    const double scale = std::max({d, a, hi, 1e-300});
    if (a * d <= 1e-14 * scale * scale) {
        // distance does not depend on theta
        const double dist = a > d ? a : d;
        if (dist >= lo - slack * scale && dist <= hi + slack * scale) arcs.push_back({-pi, two_pi});
        return arcs;
    }
    double c_lo = (d * d + a * a - hi * hi) / (2.0 * a * d);
    double c_hi = (d * d + a * a - lo * lo) / (2.0 * a * d);
    const double cslack = slack * scale * scale / (a * d) + 1e-12;
    if (c_lo > 1.0 + cslack || c_hi < -1.0 - cslack || c_lo > c_hi + cslack) return arcs;
    c_lo = std::clamp(c_lo, -1.0, 1.0);
    c_hi = std::clamp(c_hi, -1.0, 1.0);
    if (c_lo > c_hi) c_lo = c_hi = 0.5 * (c_lo + c_hi);
    const double d1 = std::acos(c_hi);  // smaller offset
    const double d2 = std::acos(c_lo);  // larger offset
    const double base = std::arg(c) - arg_h;
    const double touch = 1e-12;
    if (d1 <= touch && d2 >= pi - touch) {
        arcs.push_back({-pi, two_pi});
    } else if (d1 <= touch) {
        arcs.push_back({base - d2, 2.0 * d2});
    } else if (d2 >= pi - touch) {
        arcs.push_back({base + d1, two_pi - 2.0 * d1});
    } else {
        arcs.push_back({base + d1, d2 - d1});
        arcs.push_back({base - d2, d2 - d1});
    }
    return arcs;
}

/// Per-channel data reused across DFS solves: unnormalized radii of every prefix h^(j).
struct DfsPlan {
    std::vector<double> prefix_min;  // j -> min |sum_{i<j} h_i e^{j theta_i}|, index 0 unused
    std::vector<double> prefix_max;  // j -> ||h^(j)||_1

    static DfsPlan build(const ChannelVector& h, const InnerRadiusOptions& inner_opts = {})
    {
        DfsPlan plan;
        plan.prefix_min.assign(h.size() + 1, 0.0);
        plan.prefix_max.assign(h.size() + 1, 0.0);
        for (std::size_t j = 1; j <= h.size(); ++j) {
            const ChannelVector sub = h.prefix(j);
            const double root_j = std::sqrt(static_cast<double>(j));
            double m = 0.0;
            if (j == 1) m = std::abs(h[0]);
            else if (j == 2) m = closed_form_inner_n2(sub);
            else if (j == 3) m = closed_form_inner_n3(sub);
            else m = inner_radius(sub, inner_opts).value;
            plan.prefix_min[j] = m * root_j;
            plan.prefix_max[j] = sub.norm_l1();
        }
        return plan;
    }
};

/// Two-step precoder for moderate N: a depth-first search over discretized admissible
/// phase sets (antennas assigned from the last to the first, each choice keeping the
/// remaining target inside the doughnut of the remaining antennas), then coordinate
/// descent from the seed. Branches are tried center-out within each arc.
inline PhaseSolution solve_dfs_two_step(const ChannelVector& h, complex u, const DfsPlan& plan,
                                        const SolverOptions& opts = {})
{
    const std::size_t n = h.size();
    const double root_n = std::sqrt(static_cast<double>(n));
    const DoughnutRegion region{plan.prefix_min[n] / root_n, plan.prefix_max[n] / root_n, n};
    detail::check_in_region(region, u, opts);

    const std::size_t depth = opts.dfs_depth > 0 ? std::min<std::size_t>(static_cast<std::size_t>(opts.dfs_depth), n - 1)
                                                 : n - 1;
    const double seed_threshold = opts.dfs_threshold * region.outer;
    const complex target = u * root_n;
    const int grid = std::max(1, opts.dfs_grid);

    auto candidates = [&](std::size_t level, complex remaining) {
        const std::size_t idx = n - 1 - level;
        const std::size_t rest = idx;  // antennas 0..idx-1 still free
        std::vector<double> out;
        const auto arcs = admissible_arcs(remaining, std::abs(h[idx]), std::arg(h[idx]), plan.prefix_min[rest],
                                          plan.prefix_max[rest]);
        if (arcs.empty()) return out;
        // grid offsets ordered from the arc center outwards
        std::vector<double> offsets;
        offsets.reserve(static_cast<std::size_t>(grid));
        for (int g = 0; g < grid; ++g) {
            const int k = (g % 2 == 0) ? g / 2 : -(g + 1) / 2;
            offsets.push_back(static_cast<double>(k) / grid);
        }
        for (std::size_t g = 0; g < offsets.size(); ++g) {
            for (const auto& arc : arcs) {
                if (arc.width <= 1e-12) {
                    if (g == 0) out.push_back(arc.start);
                    continue;
                }
                // interior grid: centers of `grid` equal cells, reached center-out
                const double center = arc.start + 0.5 * arc.width;
                double pos = center + offsets[g] * arc.width;
                if (grid % 2 == 0) pos += 0.5 * arc.width / grid;
                if (pos > arc.start + arc.width) continue;
                out.push_back(pos);
            }
        }
        return out;
    };

    struct Frame {
        std::vector<double> options;
        std::size_t next = 0;
        complex remaining;
    };

    std::vector<double> assigned(n, 0.0);
    std::vector<Frame> stack;
    stack.push_back({candidates(0, target), 0, target});
    long nodes = 0;
    int iterations = 0;
    std::optional<PhaseSolution> best;

    while (!stack.empty()) {
        if (nodes >= opts.dfs_node_budget) break;
        Frame& frame = stack.back();
        if (frame.next >= frame.options.size()) {
            stack.pop_back();
            continue;
        }
        const std::size_t level = stack.size() - 1;
        const std::size_t idx = n - 1 - level;
        const double theta = frame.options[frame.next++];
        ++nodes;
        assigned[idx] = theta;
        const complex remaining = frame.remaining - h[idx] * std::polar(1.0, theta);

        if (level + 1 < depth) {
            auto next = candidates(level + 1, remaining);
            if (!next.empty()) stack.push_back({std::move(next), 0, remaining});
            continue;
        }

        // Leaf: complete the seed. With one antenna left it is aligned with what
        // remains; otherwise the free phases start at zero.
        std::vector<double> seed(n, 0.0);
        for (std::size_t i = idx; i < n; ++i) seed[i] = assigned[i];
        if (idx == 1) seed[0] = std::arg(remaining) - std::arg(h[0]);
        PhaseVector phases(std::move(seed));
        const double seed_error = precoding_residual(h, phases, u);
        if (seed_error > seed_threshold) continue;
        const auto report = refine_coord_descent(h, u, phases, opts);
        iterations += report.sweeps;
        auto candidate = detail::finish(h, std::move(phases), u, SolverKind::DfsTwoStep,
                                        static_cast<int>(nodes) + iterations, opts, SolveStatus::SearchExhausted);
        if (candidate.accepted) return candidate;
        if (!best || candidate.residual < best->residual) best = std::move(candidate);
    }

    if (best) {
        best->status = SolveStatus::SearchExhausted;
        best->iterations = static_cast<int>(nodes) + iterations;
        return *best;
    }
    PhaseSolution fallback = solve_coord_descent(h, u, opts);
    fallback.solver = SolverKind::DfsTwoStep;
    fallback.status = fallback.accepted ? SolveStatus::Converged : SolveStatus::SearchExhausted;
    return fallback;
}

inline PhaseSolution solve_dfs_two_step(const ChannelVector& h, complex u, const SolverOptions& opts = {})
{
    return solve_dfs_two_step(h, u, DfsPlan::build(h, opts.inner), opts);
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

struct DispatchPolicy {
    std::size_t closed_form_max = 3;  // N <= this: closed forms
    std::size_t dfs_max = 10;         // closed_form_max < N <= this: DFS two-step
    bool homotopy_fallback = true;
};

inline SolverKind planned_solver(std::size_t n, const DispatchPolicy& policy = {})
{
    if (n == 2 && policy.closed_form_max >= 2) return SolverKind::ClosedFormN2;
    if (n == 3 && policy.closed_form_max >= 3) return SolverKind::ClosedFormN3;
    if (n > 3 && n <= policy.dfs_max) return SolverKind::DfsTwoStep;
    return SolverKind::CoordDescent;
}

/// Routes by antenna count and falls back to the homotopy solver when the primary
/// solver does not reach epsilon_solve.
inline PhaseSolution dispatch_solve(const ChannelVector& h, complex u, const DispatchPolicy& policy = {},
                                    const SolverOptions& opts = {})
{
    const double outer = outer_radius(h);
    if (std::abs(u) > outer * (1.0 + opts.region_tolerance)) {
        throw TargetOutsideDoughnut("|u| = " + std::to_string(std::abs(u)) + " exceeds M(h) = " + std::to_string(outer));
    }
    if (h.size() == 1) {
        detail::check_in_region({std::abs(h[0]), outer, 1}, u, opts);
    }

    PhaseSolution primary;
    switch (planned_solver(h.size(), policy)) {
    case SolverKind::ClosedFormN2: primary = solve_closed_form_n2(h, u, opts); break;
    case SolverKind::ClosedFormN3: primary = solve_closed_form_n3(h, u, opts); break;
    case SolverKind::DfsTwoStep: primary = solve_dfs_two_step(h, u, opts); break;
    default: primary = solve_coord_descent(h, u, opts); break;
    }
    if (primary.accepted || !policy.homotopy_fallback) return primary;

    PhaseSolution fallback = solve_homotopy(h, u, opts);
    fallback.iterations += primary.iterations;
    return fallback.residual <= primary.residual ? fallback : primary;
}

} // namespace cedonut

#endif // CEDONUT_PRECODER_HPP
