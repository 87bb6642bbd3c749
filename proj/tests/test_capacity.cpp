// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cedonut/capacity.hpp"

using namespace cedonut;

namespace {

ChannelVector make(std::initializer_list<complex> g) { return ChannelVector(std::vector<complex>(g)); }

// Golden-section minimization over log(beta).
template <class F>
double golden_min(F f, double lo, double hi, int iterations = 200)
{
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - ratio * (b - a), d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iterations; ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

} // namespace

TEST(SnrPoint, DbRoundTrip)
{
    for (double db = -30; db <= 40; db += 0.37) EXPECT_NEAR(SnrPoint::from_db(db).db(), db, 1e-12);
    EXPECT_THROW(SnrPoint(0.0), InvalidArgument);
    EXPECT_THROW(SnrPoint(-1.0), InvalidArgument);
}

TEST(Epi, Examples)
{
    EXPECT_NEAR(epi_lower_bound({0.0, 1.0, 2}, SnrPoint(e)).rate, 1.0, 1e-14);
    const auto degenerate = epi_lower_bound({1.0, 1.0, 1}, SnrPoint(10.0));
    EXPECT_TRUE(degenerate.degenerate);
    EXPECT_EQ(degenerate.rate, 0.0);
    const auto h = draw_channel(FadingModel::dlos(1.0, 4), 1, 1);
    const DoughnutRegion region{0.0, outer_radius(h), 4};
    EXPECT_NEAR(epi_lower_bound(region, SnrPoint(1.0)).rate, std::log2(1.0 + 4.0 / e), 1e-12);
    EXPECT_NEAR(std::log2(1.0 + 4.0 / e), 1.30540, 1e-5);
}

TEST(KlUpper, Examples)
{
    // as snr -> 0 the bound tends to 1/2 log2(pi / e)
    EXPECT_NEAR(kl_upper_bound_i1({0.0, 1.0, 2}, SnrPoint(1e-12)), 0.5 * std::log2(pi / e), 1e-9);
    EXPECT_NEAR(0.5 * std::log2(pi / e), 0.10440, 1e-5);
    const double direct = 0.5 * std::log2(pi / (2 * e)) + 0.5 * std::log2(10402.0);
    EXPECT_NEAR(kl_upper_bound_i1({0.0, 1.0, 2}, SnrPoint(100.0)), direct, 1e-12);
    EXPECT_NEAR(direct, 6.27669, 1e-5);
}

TEST(KlUpper, MonotoneAndBelowLooserForm)
{
    for (double m_outer : {0.1, 1.0, 3.0}) {
        const DoughnutRegion r{0.0, m_outer, 4};
        double prev = -1e300;
        for (double db = -30; db <= 50; db += 0.5) {
            const SnrPoint s = SnrPoint::from_db(db);
            const double v = kl_upper_bound_i1(r, s);
            EXPECT_GT(v, prev);
            prev = v;
            EXPECT_LE(v, kl_upper_bound_i1_loose(r, s) + 1e-12);
        }
    }
}

TEST(KlUpper, NumericBetaMinimizationMatchesClosedForm)
{
    RngStream s(7, 0);
    for (int k = 0; k < 200; ++k) {
        const DoughnutRegion r{0.0, s.uniform(0.05, 5.0), 4};
        const SnrPoint snr = SnrPoint::from_db(s.uniform(-20.0, 40.0));
        const double numeric =
            golden_min([&](double log_beta) { return kl_upper_bound_beta(r, snr, std::exp(log_beta)); }, -40.0, 20.0);
        EXPECT_NEAR(numeric, kl_upper_bound_i1(r, snr), 1e-9);
    }
}

TEST(PapcAtpc, Examples)
{
    const auto h1 = make({{0.3, -0.4}});
    const auto r1 = DoughnutRegion{0.5, 0.5, 1};
    EXPECT_DOUBLE_EQ(papc_capacity(r1, SnrPoint(3.0)), atpc_capacity(h1, SnrPoint(3.0)));

    const auto dlos = draw_channel(FadingModel::dlos(1.0, 4), 2, 2);
    const DoughnutRegion rd{0.0, outer_radius(dlos), 4};
    EXPECT_NEAR(papc_capacity(rd, SnrPoint(2.0)), atpc_capacity(dlos, SnrPoint(2.0)), 1e-12);

    const auto hr = make({1, {0, 1}});
    const DoughnutRegion rr{0.0, outer_radius(hr), 2};
    EXPECT_NEAR(papc_capacity(rr, SnrPoint(5.0)), std::log2(11.0), 1e-12);
    EXPECT_NEAR(atpc_capacity(hr, SnrPoint(5.0)), std::log2(11.0), 1e-12);
}

TEST(Bounds, RandomOrdering)
{
    for (int t = 0; t < 2000; ++t) {
        const auto h = draw_channel(FadingModel::rayleigh(1 + t % 16), 9, t);
        const auto region = make_region(h);
        RngStream s(10, t);
        const SnrPoint snr = SnrPoint::from_db(s.uniform(-20.0, 40.0));
        const auto b = rate_bounds(h, region, snr);
        EXPECT_LE(b.papc, b.atpc + 1e-12);
        EXPECT_DOUBLE_EQ(b.combined_upper_i2, std::min(b.kl_upper_i1, b.papc));
        if (!b.degenerate) { EXPECT_LE(b.epi_lower, b.combined_upper_i2 + 1e-12); }
        EXPECT_LE(b.combined_upper_i2, std::max(b.papc, b.atpc));
    }
}

TEST(I2, Regimes)
{
    const DoughnutRegion r{0.0, 1.0, 4};
    // snr M^2 = 0.5: PAPC is the tighter one
    EXPECT_DOUBLE_EQ(combined_upper_bound_i2(r, SnrPoint(0.5)), papc_capacity(r, SnrPoint(0.5)));
    const SnrPoint high(1e9);
    EXPECT_DOUBLE_EQ(combined_upper_bound_i2(r, high), kl_upper_bound_i1(r, high));
    EXPECT_NEAR(papc_capacity(r, high) - kl_upper_bound_i1(r, high), 0.5 * std::log2(2 * e / pi), 1e-6);
    EXPECT_NEAR(0.5 * std::log2(2 * e / pi), 0.3956, 1e-4);
}

TEST(PowerGap, DlosValues)
{
    const auto h = draw_channel(FadingModel::dlos(1.0, 6), 3, 3);
    const auto low = power_gap_bounds(h, 0.0, SnrRegime::Low);
    EXPECT_NEAR(low.lower_db, 0.0, 1e-12);
    const auto high = power_gap_bounds(h, 0.0, SnrRegime::High);
    EXPECT_NEAR(high.lower_db, linear_to_db(2.0), 1e-12);
    EXPECT_NEAR(high.upper_db, linear_to_db(e), 1e-12);
    EXPECT_NEAR(high.upper_db - high.lower_db, linear_to_db(e / 2.0), 1e-12);
    EXPECT_NEAR(kappa(h, 0.0), 1.0 / e, 1e-14);
}

TEST(PowerGap, RayleighMomentLimits)
{
    // N -> infinity: ||h||^2 / N -> E|h|^2 = 1 and ||h||_1 / N -> E|h| = sqrt(pi) / 2
    const double ratio = 1.0 / (pi / 4.0);
    EXPECT_NEAR(linear_to_db(ratio), 1.05, 0.005);
    EXPECT_NEAR(linear_to_db(2.0 * ratio), 4.06, 0.005);
    EXPECT_NEAR(linear_to_db(e * ratio), 5.39, 0.005);
    EXPECT_NEAR((pi / 4.0) / e, 0.2890, 1e-4);
}

TEST(PowerGap, HighSnrBoundChain)
{
    for (int t = 0; t < 200; ++t) {
        const auto h = draw_channel(FadingModel::rayleigh(2 + t % 30), 12, t);
        const auto region = make_region(h);
        const auto g = power_gap_bounds(h, region.inner, SnrRegime::High);
        EXPECT_LE(g.lower_db, g.upper_db + 1e-12);
        // 1/kappa >= e ||h||^2 N / ||h||_1^2
        const double n = static_cast<double>(h.size());
        EXPECT_GE(1.0 / kappa(h, region.inner), e * h.norm_l2_squared() * n / (h.norm_l1() * h.norm_l1()) * (1 - 1e-12));
    }
}

TEST(CapacityRatio, Examples)
{
    const auto h = draw_channel(FadingModel::dlos(1.0, 4), 5, 5);
    const SnrPoint snr(30.0);
    EXPECT_NEAR(capacity_ratio_bound(h, 0.0, snr), 1.0 - std::log2(e) / atpc_capacity(h, snr), 1e-12);
    EXPECT_NEAR(capacity_ratio_bound(h, 0.0, SnrPoint(1e300)), 1.0, 0.01);
    EXPECT_NEAR(low_snr_capacity_ratio(h), 1.0, 1e-12);
}

TEST(Rho, Examples)
{
    const auto a = efficiency_gain_rho(0.8, 0.2, 6.0);
    EXPECT_NEAR(a.linear, 4.0 / std::pow(10.0, 0.6), 1e-12);
    EXPECT_GT(a.linear, 1.0);
    // 10 log10(4) - 1.05 = 4.97 dB; the quoted 4.95 rounds 10 log10(4) to 6 dB
    EXPECT_NEAR(efficiency_gain_rho(0.8, 0.2, 1.05).db, 4.95, 0.03);
    EXPECT_NEAR(efficiency_gain_rho(0.5, 0.5, 0.0).linear, 1.0, 1e-15);
    EXPECT_THROW(efficiency_gain_rho(0.0, 0.2, 1.0), InvalidArgument);
    EXPECT_THROW(efficiency_gain_rho(0.5, -0.2, 1.0), InvalidArgument);
    EXPECT_THROW(efficiency_gain_rho(1.5, 0.2, 1.0), InvalidArgument);
}
