// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_EXPERIMENTS_HPP
#define CEDONUT_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "cedonut/alphabets.hpp"
#include "cedonut/capacity.hpp"
#include "cedonut/csv.hpp"
#include "cedonut/doughnut.hpp"
#include "cedonut/error.hpp"
#include "cedonut/fading.hpp"
#include "cedonut/numeric.hpp"
#include "cedonut/parallel.hpp"
#include "cedonut/rng.hpp"

namespace cedonut {

struct ExperimentConfig {
    std::uint64_t master_seed = 1;
    std::size_t trials = 10000;
    std::vector<std::size_t> n_grid{4};
    std::vector<double> snr_grid_db{0.0};
    FadingKind fading = FadingKind::IidRayleigh;
    double fading_parameter = 1.0;
    double target_rate = 3.0;  // bits per channel use

    [[nodiscard]] FadingModel model(std::size_t n) const { return {fading, fading_parameter, n}; }

    void validate() const
    {
        require(trials >= 1, "trials must be at least 1");
        require(!n_grid.empty(), "antenna grid must be nonempty");
        require(!snr_grid_db.empty(), "SNR grid must be nonempty");
        require(std::is_sorted(n_grid.begin(), n_grid.end()), "antenna grid must be sorted");
        require(std::is_sorted(snr_grid_db.begin(), snr_grid_db.end()), "SNR grid must be sorted");
        for (auto n : n_grid) require(n >= 1, "antenna counts must be at least 1");
        for (auto s : snr_grid_db) require(std::isfinite(s), "SNR grid values must be finite");
        model(n_grid.front()).validate();
        require(target_rate > 0.0 && std::isfinite(target_rate), "target rate must be positive");
    }
};

using ExperimentResult = Table;

/// Channel draws with their doughnut regions. Trial t of an N-antenna ensemble uses
/// the stream (derive_seed(master_seed, N), t), so ensembles for different N are
/// independent and every draw is reproducible on its own.
struct ChannelEnsemble {
    std::vector<ChannelVector> channels;
    std::vector<DoughnutRegion> regions;

    [[nodiscard]] std::size_t size() const { return channels.size(); }
};

inline ChannelEnsemble make_ensemble(const FadingModel& model, std::uint64_t master_seed, std::size_t trials,
                                     const InnerRadiusOptions& inner = {})
{
    model.validate();
    const std::uint64_t seed = derive_seed(master_seed, model.n_antennas);
    std::vector<std::optional<ChannelVector>> channels(trials);
    std::vector<DoughnutRegion> regions(trials);
    parallel_for(trials, [&](std::size_t t) {
        channels[t] = draw_channel(model, seed, t);
        regions[t] = make_region(*channels[t], inner);
    });
    ChannelEnsemble out;
    out.channels.reserve(trials);
    for (auto& c : channels) out.channels.push_back(std::move(*c));
    out.regions = std::move(regions);
    return out;
}

template <class F>
MeanEstimate ensemble_mean(std::size_t count, F&& per_trial)
{
    std::vector<double> values(count);
    parallel_for(count, [&](std::size_t t) { values[t] = per_trial(t); });
    return mean_and_stderr(values);
}

// ---------------------------------------------------------------------------
// m(h) / M(h) ratio
// ---------------------------------------------------------------------------

inline ExperimentResult mh_ratio_curve(const ExperimentConfig& config)
{
    config.validate();
    ExperimentResult out;
    out.experiment = "mh-ratio";
    out.master_seed = config.master_seed;
    out.note("trials", std::to_string(config.trials));
    out.note("fading", to_string(config.model(1)));
    out.columns = {"n", "mean_m_over_M", "stderr_m_over_M", "mean_linf_over_l1", "stderr_linf_over_l1"};
    for (auto n : config.n_grid) {
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        const auto ratio = ensemble_mean(ens.size(), [&](std::size_t t) {
            return ens.regions[t].outer > 0.0 ? ens.regions[t].inner / ens.regions[t].outer : 0.0;
        });
        const auto bound = ensemble_mean(ens.size(), [&](std::size_t t) {
            const auto& h = ens.channels[t];
            return h.norm_l1() > 0.0 ? h.norm_linf() / h.norm_l1() : 0.0;
        });
        out.add_row({static_cast<std::int64_t>(n), ratio.mean, ratio.stderr_mean, bound.mean, bound.stderr_mean});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ergodic rates
// ---------------------------------------------------------------------------

enum class RateScheme {
    Mrt,         // ATPC capacity, log2(1 + snr ||h||^2)
    Papc,        // log2(1 + snr M^2)
    EpiLower,    // EPI lower bound for the uniform doughnut input (0 on zero-area regions)
    UpperI2,     // min(I1, PAPC)
    UnifEpi,     // EPI achievable rate; a zero-area region is the circle, whose MI is used instead
    MiUniform,   // numerically integrated MI of the uniform doughnut input
    DauipFixed,  // DAUIP with a fixed alphabet
    BestDauip,   // DAUIP with (L, alpha) optimized at each SNR
};

inline const char* to_string(RateScheme s)
{
    switch (s) {
    case RateScheme::Mrt: return "mrt";
    case RateScheme::Papc: return "papc";
    case RateScheme::EpiLower: return "epi-lower";
    case RateScheme::UpperI2: return "i2";
    case RateScheme::UnifEpi: return "unif-epi";
    case RateScheme::MiUniform: return "unif";
    case RateScheme::DauipFixed: return "dauip";
    case RateScheme::BestDauip: return "best-dauip";
    }
    return "unknown";
}

inline RateScheme parse_rate_scheme(const std::string& text)
{
    for (auto s : {RateScheme::Mrt, RateScheme::Papc, RateScheme::EpiLower, RateScheme::UpperI2, RateScheme::UnifEpi,
                   RateScheme::MiUniform, RateScheme::DauipFixed, RateScheme::BestDauip}) {
        if (text == to_string(s)) return s;
    }
    if (text == "atpc") return RateScheme::Mrt;
    throw InvalidArgument("unknown scheme '" + text +
                          "' (expected mrt|atpc|papc|epi-lower|i2|unif-epi|unif|dauip|best-dauip)");
}

struct RateOptions {
    DauipAlphabet alphabet{std::vector<double>{1.0}};  // DauipFixed
    DauipSearch search{};                               // BestDauip
    /// BestDauip: (L, alpha) is searched on the first `search_trials` channels of
    /// the ensemble, then evaluated on all of them.
    std::size_t search_trials = 200;
    MiOptions mi{};
};

struct RatePoint {
    MeanEstimate rate{};
    std::optional<DauipAlphabet> alphabet;  // the alphabet used, for DAUIP schemes
};

inline double per_channel_rate(RateScheme scheme, const ChannelVector& h, const DoughnutRegion& region, SnrPoint snr,
                               const DauipAlphabet& alphabet, const MiOptions& mi)
{
    switch (scheme) {
    case RateScheme::Mrt: return atpc_capacity(h, snr);
    case RateScheme::Papc: return papc_capacity(region, snr);
    case RateScheme::EpiLower: return epi_lower_bound(region, snr).rate;
    case RateScheme::UpperI2: return combined_upper_bound_i2(region, snr);
    case RateScheme::UnifEpi: {
        const auto epi = epi_lower_bound(region, snr);
        return epi.degenerate ? mutual_info_uniform_doughnut(region, snr, mi).mean : epi.rate;
    }
    case RateScheme::MiUniform: return mutual_info_uniform_doughnut(region, snr, mi).mean;
    case RateScheme::DauipFixed:
    case RateScheme::BestDauip: return mutual_info_dauip(alphabet, region, snr, mi).mean;
    }
    return 0.0;
}

/// Ensemble-mean rate of one scheme at one SNR.
inline RatePoint ergodic_rate(RateScheme scheme, const ChannelEnsemble& ens, SnrPoint snr, const RateOptions& opts = {})
{
    RatePoint out;
    DauipAlphabet alphabet = opts.alphabet;
    if (scheme == RateScheme::BestDauip) {
        const std::size_t k = std::min(std::max<std::size_t>(opts.search_trials, 1), ens.size());
        alphabet = optimize_dauip(std::span(ens.regions).first(k), snr, opts.search).alphabet;
    }
    if (scheme == RateScheme::DauipFixed || scheme == RateScheme::BestDauip) out.alphabet = alphabet;
    out.rate = ensemble_mean(ens.size(), [&](std::size_t t) {
        return per_channel_rate(scheme, ens.channels[t], ens.regions[t], snr, alphabet, opts.mi);
    });
    return out;
}

inline std::string describe_alphabet(const DauipAlphabet& a)
{
    std::string s;
    for (std::size_t l = 0; l < a.ring_count(); ++l) s += (l ? ";" : "") + format_number(a.alphas()[l]);
    return s;
}

/// Rows (n, snr_db, scheme, mean rate, stderr, alphabet) for each N, SNR and scheme.
/// DAUIP alphabets are optimized per SNR, shared by all channels at that SNR.
inline ExperimentResult ergodic_rate_curves(const ExperimentConfig& config, const std::vector<RateScheme>& schemes,
                                            const RateOptions& opts = {})
{
    config.validate();
    require(!schemes.empty(), "at least one scheme is required");
    ExperimentResult out;
    out.experiment = "rate-curve";
    out.master_seed = config.master_seed;
    out.note("trials", std::to_string(config.trials));
    out.note("fading", to_string(config.model(1)));
    out.note("units", "snr_db = 10 log10(P_T / sigma^2); rates in bits per channel use");
    out.columns = {"n", "snr_db", "scheme", "rate", "stderr", "alphas"};
    for (auto n : config.n_grid) {
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        for (double snr_db : config.snr_grid_db) {
            for (auto scheme : schemes) {
                const auto point = ergodic_rate(scheme, ens, SnrPoint::from_db(snr_db), opts);
                out.add_row({static_cast<std::int64_t>(n), snr_db, std::string(to_string(scheme)), point.rate.mean,
                             point.rate.stderr_mean, point.alphabet ? describe_alphabet(*point.alphabet) : std::string()});
            }
        }
    }
    return out;
}

/// Wide table of the closed-form bounds: (n, snr_db, epi_lower, i2, papc, atpc) means.
inline ExperimentResult bounds_curve(const ExperimentConfig& config)
{
    config.validate();
    ExperimentResult out;
    out.experiment = "bounds";
    out.master_seed = config.master_seed;
    out.note("trials", std::to_string(config.trials));
    out.note("fading", to_string(config.model(1)));
    out.note("units", "snr_db = 10 log10(P_T / sigma^2); rates in bits per channel use");
    out.columns = {"n", "snr_db", "epi_lower", "i2", "papc", "atpc"};
    for (auto n : config.n_grid) {
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        for (double snr_db : config.snr_grid_db) {
            std::vector<Cell> row{static_cast<std::int64_t>(n), snr_db};
            for (auto s : {RateScheme::EpiLower, RateScheme::UpperI2, RateScheme::Papc, RateScheme::Mrt})
                row.emplace_back(ergodic_rate(s, ens, SnrPoint::from_db(snr_db)).rate.mean);
            out.add_row(std::move(row));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Minimum SNR for a target rate
// ---------------------------------------------------------------------------

struct MinSnrOptions {
    double bracket_lo_db = -20.0;
    double bracket_hi_db = 25.0;
    int max_iterations = 40;
    double tolerance_db = 0.01;  // stop once the bracket is this narrow
    /// BestDauip: number of (optimize alphabet at the current estimate, re-solve) rounds.
    int dauip_rounds = 2;
    RateOptions rate{};
};

struct MinSnrResult {
    double snr_db = 0.0;
    /// Standard error of snr_db propagated from the rate's standard error through the local slope.
    double stderr_db = 0.0;
    MeanEstimate rate{};
    int iterations = 0;
    std::optional<DauipAlphabet> alphabet;
};

namespace detail {

template <class RateAt>
MinSnrResult bisect_min_snr(RateAt&& rate_at, double target, const MinSnrOptions& opts)
{
    double lo = opts.bracket_lo_db, hi = opts.bracket_hi_db;
    MeanEstimate at_lo = rate_at(lo), at_hi = rate_at(hi);
    if (at_lo.mean > target || at_hi.mean < target) {
        throw NumericFailure("target rate " + format_number(target) + " is not reachable inside the SNR bracket [" +
                             format_number(lo) + ", " + format_number(hi) + "] dB");
    }
    MinSnrResult out;
    while (out.iterations < opts.max_iterations && hi - lo > opts.tolerance_db) {
        const double mid = 0.5 * (lo + hi);
        const MeanEstimate r = rate_at(mid);
        ++out.iterations;
        if (r.mean < target) {
            lo = mid;
            at_lo = r;
        } else {
            hi = mid;
            at_hi = r;
        }
    }
    // linear interpolation inside the final bracket
    const double span = at_hi.mean - at_lo.mean;
    const double frac = span > 0.0 ? std::clamp((target - at_lo.mean) / span, 0.0, 1.0) : 0.5;
    out.snr_db = lo + frac * (hi - lo);
    out.rate = frac < 0.5 ? at_lo : at_hi;
    const double slope = hi > lo && span > 0.0 ? span / (hi - lo) : 0.0;  // bits per dB
    out.stderr_db = slope > 0.0 ? out.rate.stderr_mean / slope : 0.0;
    return out;
}

} // namespace detail

inline MinSnrResult min_snr_for_rate(RateScheme scheme, const ChannelEnsemble& ens, double target_rate,
                                     const MinSnrOptions& opts = {})
{
    require(target_rate > 0.0, "target rate must be positive");
    require(opts.bracket_lo_db < opts.bracket_hi_db, "SNR bracket must be increasing");
    if (scheme != RateScheme::BestDauip) {
        auto rate_at = [&](double db) { return ergodic_rate(scheme, ens, SnrPoint::from_db(db), opts.rate).rate; };
        auto out = detail::bisect_min_snr(rate_at, target_rate, opts);
        if (scheme == RateScheme::DauipFixed) out.alphabet = opts.rate.alphabet;
        return out;
    }

    // Best DAUIP: the alphabet is optimal for one SNR. Start from L = 1, alpha = 1,
    // then alternate between optimizing the alphabet at the current estimate and
    // solving for the SNR with that alphabet.
    RateOptions fixed = opts.rate;
    fixed.alphabet = DauipAlphabet({1.0});
    MinSnrOptions round = opts;
    round.rate = fixed;
    MinSnrResult current = min_snr_for_rate(RateScheme::DauipFixed, ens, target_rate, round);
    int iterations = current.iterations;
    const std::size_t k = std::min(std::max<std::size_t>(opts.rate.search_trials, 1), ens.size());
    for (int r = 0; r < opts.dauip_rounds; ++r) {
        const auto choice = optimize_dauip(std::span(ens.regions).first(k), SnrPoint::from_db(current.snr_db),
                                           opts.rate.search);
        round.rate.alphabet = choice.alphabet;
        // the new alphabet moves the answer by at most a few dB; fall back to the full bracket otherwise
        MinSnrOptions narrow = round;
        narrow.bracket_lo_db = std::max(opts.bracket_lo_db, current.snr_db - 3.0);
        narrow.bracket_hi_db = std::min(opts.bracket_hi_db, current.snr_db + 1.0);
        MinSnrResult next;
        try {
            next = min_snr_for_rate(RateScheme::DauipFixed, ens, target_rate, narrow);
        } catch (const NumericFailure&) {
            next = min_snr_for_rate(RateScheme::DauipFixed, ens, target_rate, round);
        }
        iterations += next.iterations;
        const bool settled = std::abs(next.snr_db - current.snr_db) <= opts.tolerance_db;
        if (next.snr_db <= current.snr_db) current = std::move(next);
        if (settled) break;
    }
    current.iterations = iterations;
    return current;
}

inline const char* default_scheme_list() { return "mrt,papc,unif-epi,best-dauip"; }

inline ExperimentResult min_snr_table(const ExperimentConfig& config, const std::vector<RateScheme>& schemes,
                                      const MinSnrOptions& opts = {})
{
    config.validate();
    require(!schemes.empty(), "at least one scheme is required");
    ExperimentResult out;
    out.experiment = "min-snr";
    out.master_seed = config.master_seed;
    out.note("trials", std::to_string(config.trials));
    out.note("fading", to_string(config.model(1)));
    out.note("target_rate_bpcu", format_number(config.target_rate));
    out.note("units", "snr_db = 10 log10(P_T / sigma^2)");
    out.columns = {"n", "scheme", "min_snr_db", "stderr_db", "rate_at_min", "iterations", "alphas"};
    for (auto n : config.n_grid) {
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        for (auto scheme : schemes) {
            const auto res = min_snr_for_rate(scheme, ens, config.target_rate, opts);
            out.add_row({static_cast<std::int64_t>(n), std::string(to_string(scheme)), res.snr_db, res.stderr_db,
                         res.rate.mean, static_cast<std::int64_t>(res.iterations),
                         res.alphabet ? describe_alphabet(*res.alphabet) : std::string()});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Array power gain
// ---------------------------------------------------------------------------

/// Per-realization MRT array gain sum |h_i|^2 / |h_1|^2. Its mean is infinite under
/// Rayleigh fading (1/|h_1|^2 is not integrable), so the median is the summary used.
inline double mrt_array_gain(const ChannelVector& h)
{
    return h.norm_l2_squared() / std::norm(h[0]);
}

/// Rows (n, scheme, min_snr_db, gain_db) with gain_db = min-SNR(first N) - min-SNR(N),
/// i.e. the array power gain relative to the smallest N of the grid.
inline ExperimentResult array_power_gain(const ExperimentConfig& config, const std::vector<RateScheme>& schemes,
                                         const MinSnrOptions& opts = {})
{
    const auto table = min_snr_table(config, schemes, opts);
    ExperimentResult out;
    out.experiment = "apg";
    out.master_seed = config.master_seed;
    out.provenance = table.provenance;
    out.columns = {"n", "scheme", "min_snr_db", "gain_db", "median_mrt_gain_db"};
    std::vector<double> baseline(schemes.size(), 0.0);
    std::size_t row = 0;
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        const auto n = config.n_grid[i];
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        std::vector<double> gains(ens.size());
        for (std::size_t t = 0; t < ens.size(); ++t) gains[t] = mrt_array_gain(ens.channels[t]);
        std::nth_element(gains.begin(), gains.begin() + static_cast<std::ptrdiff_t>(gains.size() / 2), gains.end());
        const double median_gain_db = linear_to_db(gains[gains.size() / 2]);
        for (std::size_t s = 0; s < schemes.size(); ++s, ++row) {
            const double snr_db = std::get<double>(table.rows[row][2]);
            if (i == 0) baseline[s] = snr_db;
            out.add_row({static_cast<std::int64_t>(n), std::string(to_string(schemes[s])), snr_db, baseline[s] - snr_db,
                         median_gain_db});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Outage
// ---------------------------------------------------------------------------

struct ProportionEstimate {
    std::size_t events = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    double stderr_estimate = 0.0;
    double ci_low = 0.0;   // Clopper-Pearson
    double ci_high = 0.0;
};

inline ProportionEstimate estimate_proportion(std::size_t events, std::size_t trials, double confidence = 0.95)
{
    require(trials > 0, "proportion needs at least one trial");
    require(events <= trials, "events cannot exceed trials");
    ProportionEstimate p;
    p.events = events;
    p.trials = trials;
    const double n = static_cast<double>(trials), k = static_cast<double>(events);
    p.estimate = k / n;
    p.stderr_estimate = std::sqrt(p.estimate * (1.0 - p.estimate) / n);
    const double alpha = 1.0 - confidence;
    p.ci_low = events == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
    p.ci_high = events == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return p;
}

/// (1 - exp(-2 e N (2^R - 1) / snr))^(N - 1): the closed-form outage upper bound
/// through the normalized spacings Y_i of the ordered |h_i|^2.
inline double outage_bound_analytic(std::size_t n, double rate, SnrPoint snr)
{
    require(n >= 1, "N must be at least 1");
    const double threshold = 2.0 * e * static_cast<double>(n) * (std::exp2(rate) - 1.0) / snr.linear();
    return std::pow(-std::expm1(-threshold), static_cast<double>(n - 1));
}

/// Normalized spacings Y_i = (N - i + 1)(Z_(i) - Z_(i-1)) of the ordered Z_i = |h_i|^2,
/// i.i.d. unit exponentials under Rayleigh fading.
inline std::vector<double> normalized_spacings(const ChannelVector& h)
{
    std::vector<double> z(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) z[i] = std::norm(h[i]);
    std::sort(z.begin(), z.end());
    std::vector<double> y(z.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        y[i] = static_cast<double>(z.size() - i) * (z[i] - prev);
        prev = z[i];
    }
    return y;
}

/// Monte-Carlo counterpart of outage_bound_analytic from channel draws:
/// Prob(Y_i <= 2 e N (2^R - 1) / snr for i = 1..N-1).
inline bool spacing_event(const ChannelVector& h, double rate, SnrPoint snr)
{
    const double threshold = 2.0 * e * static_cast<double>(h.size()) * (std::exp2(rate) - 1.0) / snr.linear();
    const auto y = normalized_spacings(h);
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
        if (y[i] > threshold) return false;
    return true;
}

/// Rows per (n, snr): MC lower bound Prob(I2 <= R), MC upper bound
/// Prob(log2(1 + snr (M^2 - m^2)/e) <= R), the analytic bound and its MC
/// construction, each with Clopper-Pearson intervals. The same channels are
/// reused at every SNR.
inline ExperimentResult outage_bounds(const ExperimentConfig& config)
{
    config.validate();
    require(config.fading == FadingKind::IidRayleigh, "outage bounds assume i.i.d. Rayleigh fading");
    ExperimentResult out;
    out.experiment = "outage";
    out.master_seed = config.master_seed;
    out.note("trials", std::to_string(config.trials));
    out.note("rate_bpcu", format_number(config.target_rate));
    out.note("units", "snr_db = 10 log10(P_T / sigma^2); probabilities; ci = 95% Clopper-Pearson");
    out.columns = {"n",         "snr_db",        "lower_mc",       "lower_ci_low",    "lower_ci_high",
                   "upper_mc",  "upper_ci_low",  "upper_ci_high",  "analytic_bound",  "analytic_mc",
                   "analytic_mc_stderr"};
    for (auto n : config.n_grid) {
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        for (double snr_db : config.snr_grid_db) {
            const SnrPoint snr = SnrPoint::from_db(snr_db);
            std::size_t lower = 0, upper = 0, spacing = 0;
            for (std::size_t t = 0; t < ens.size(); ++t) {
                if (combined_upper_bound_i2(ens.regions[t], snr) <= config.target_rate) ++lower;
                if (epi_lower_bound(ens.regions[t], snr).rate <= config.target_rate) ++upper;
                if (spacing_event(ens.channels[t], config.target_rate, snr)) ++spacing;
            }
            const auto lo = estimate_proportion(lower, ens.size());
            const auto up = estimate_proportion(upper, ens.size());
            const auto sp = estimate_proportion(spacing, ens.size());
            out.add_row({static_cast<std::int64_t>(n), snr_db, lo.estimate, lo.ci_low, lo.ci_high, up.estimate, up.ci_low,
                         up.ci_high, outage_bound_analytic(n, config.target_rate, snr), sp.estimate, sp.stderr_estimate});
        }
    }
    return out;
}

/// Least-squares slope of -log10(p) against log10(snr) (snr in dB on input).
inline double diversity_slope(std::span<const double> snr_db, std::span<const double> probability)
{
    require(snr_db.size() == probability.size() && snr_db.size() >= 2, "slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(snr_db.size());
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
        require(probability[i] > 0.0, "slope fit needs positive probabilities");
        const double x = snr_db[i] / 10.0;
        const double y = -std::log10(probability[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Tail of m(h)
// ---------------------------------------------------------------------------

/// Prob(max of N unit exponentials <= c^2 log^2 N) = (1 - N^(-c^2 log N))^N.
inline double exponential_max_cdf(std::size_t n, double c)
{
    const double ln = std::log(static_cast<double>(n));
    return std::pow(-std::expm1(-c * c * ln * ln), static_cast<double>(n));
}

/// Rows (n, c, threshold, probability, stderr, ci_low, ci_high) for the empirical
/// Prob(m(h) >= c log(N) / sqrt(N)).
inline ExperimentResult mh_tail_check(const ExperimentConfig& config, const std::vector<double>& c_values)
{
    config.validate();
    require(config.fading == FadingKind::IidRayleigh, "m(h) tail check assumes i.i.d. Rayleigh fading");
    require(!c_values.empty(), "at least one constant c is required");
    for (double c : c_values) require(c > 0.0, "c must be positive");
    ExperimentResult out;
    out.experiment = "mh-tail";
    out.master_seed = config.master_seed;
    out.note("trials", std::to_string(config.trials));
    out.note("units", "threshold = c ln(N) / sqrt(N); ci = 95% Clopper-Pearson");
    out.columns = {"n", "c", "threshold", "probability", "stderr", "ci_low", "ci_high"};
    for (auto n : config.n_grid) {
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        for (double c : c_values) {
            const double threshold = c * std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
            std::size_t events = 0;
            for (const auto& region : ens.regions)
                if (region.inner >= threshold) ++events;
            const auto p = estimate_proportion(events, ens.size());
            out.add_row({static_cast<std::int64_t>(n), c, threshold, p.estimate, p.stderr_estimate, p.ci_low, p.ci_high});
        }
    }
    return out;
}

} // namespace cedonut

#endif // CEDONUT_EXPERIMENTS_HPP
