// SPDX-License-Identifier: Apache-2.0
// Walks one 8-antenna Rayleigh channel through the library: region, precoding,
// rate bounds and the best ring alphabet at a few SNRs.

#include <cstdio>

#include "cedonut/cedonut.hpp"

using namespace cedonut;

int main()
{
    const auto h = draw_channel(FadingModel::rayleigh(8), 2024, 0);
    const auto region = make_region(h);
    std::printf("N = %zu  m(h) = %.6f  M(h) = %.6f  ||h||_2 = %.6f\n", h.size(), region.inner, region.outer,
                h.norm_l2());

    // a target halfway between the radii, solved by the default dispatch
    const complex u = std::polar(0.5 * (region.inner + region.outer), 0.7);
    const auto sol = dispatch_solve(h, u);
    std::printf("\nprecode u = (%.4f, %.4f) with %s: residual %.3e, %s\n", u.real(), u.imag(), to_string(sol.solver),
                sol.residual, sol.accepted ? "accepted" : "not accepted");
    for (std::size_t i = 0; i < sol.phases.size(); ++i) std::printf("  theta_%zu = %+.6f rad\n", i + 1, sol.phases[i]);

    std::printf("\n%8s %10s %10s %10s %10s %10s\n", "snr_dB", "EPI", "MI unif", "I2", "PAPC", "ATPC");
    for (double db : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
        const SnrPoint snr = SnrPoint::from_db(db);
        const auto b = rate_bounds(h, region, snr);
        const auto mi = mutual_info_uniform_doughnut(region, snr);
        std::printf("%8.1f %10.4f %10.4f %10.4f %10.4f %10.4f\n", db, b.epi_lower, mi.mean, b.combined_upper_i2, b.papc,
                    b.atpc);
    }

    const std::vector<DoughnutRegion> one{region};
    DauipSearch search;
    search.alpha_grid = 16;
    search.max_rings = 3;
    std::printf("\nbest ring alphabet for this channel\n");
    for (double db : {0.0, 15.0, 30.0}) {
        const auto choice = optimize_dauip(one, SnrPoint::from_db(db), search);
        std::printf("  %5.1f dB: L = %zu, alphas = %s, MI = %.4f bpcu\n", db, choice.alphabet.ring_count(),
                    describe_alphabet(choice.alphabet).c_str(), choice.mean_mi.mean);
    }
    return 0;
}
