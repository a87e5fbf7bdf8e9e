#include "prunebound/montecarlo.hpp"
#include "prunebound/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace prunebound;

TEST(MonteCarlo, MomentsWithinThreeStandardErrors) {
    for (double d : {0.5, 2.0, 10.0}) {
        const MomentSet cf = delta_moments(d, 1.0);
        const MomentEstimate est = mc_delta_moments(d, 1.0, 200000, RngHandle{77, static_cast<std::uint64_t>(d * 10)});
        EXPECT_EQ(est.samples, 200000u);
        EXPECT_LE(std::abs(est.mean) / est.se_mean, 3.0) << d;
        EXPECT_LE(std::abs(est.m2 - cf.m2) / est.se_m2, 3.0) << d;
        EXPECT_LE(std::abs(est.m4 - cf.m4) / est.se_m4, 3.0) << d;
    }
}

TEST(MonteCarlo, WrongConstantIsDetected) {
    const MomentEstimate est = mc_delta_moments(2.0, 1.0, 200000, RngHandle{78, 0});
    EXPECT_GT(std::abs(est.m2 - 1.1 * delta_moments(2.0, 1.0).m2) / est.se_m2, 3.0);
}

TEST(MonteCarlo, ParallelEqualsSerial) {
    const RngHandle h{79, 1};
    const MomentEstimate a = mc_delta_moments(1.0, 0.25, 30001, h);
    const MomentEstimate b = serial::mc_delta_moments(1.0, 0.25, 30001, h);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.m2, b.m2);
    EXPECT_EQ(a.m4, b.m4);
    EXPECT_EQ(a.se_m4, b.se_m4);
    EXPECT_EQ(mc_balls_bins(300, 100, 500, h), serial::mc_balls_bins(300, 100, 500, h));
}

TEST(MonteCarlo, BallsBinsCoverage) {
    const auto loads = mc_balls_bins(300, 100, 4000, RngHandle{80, 0});
    const double frac = static_cast<double>(std::count_if(loads.begin(), loads.end(), [](std::size_t v) { return v <= 9; })) /
                        4000.0;
    EXPECT_GE(frac, balls_bins_bound(300, 100).prob);
    EXPECT_GE(*std::min_element(loads.begin(), loads.end()), 3u);
}

TEST(MonteCarlo, MeanDeltaNormBelowGammaAtUnitC) {
    const auto norms = mc_delta_spectral_norms(100, 100, 2.0, 1.0, 200, RngHandle{81, 0});
    double mean = 0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(norms.size());
    const double gamma = latala_gamma(100, 100, delta_moments(2.0, 1.0), 1.0).gamma_l;
    EXPECT_LE(mean, gamma);
    EXPECT_NEAR(calibrate_C(norms, gamma), mean / gamma, 1e-15);
}

TEST(MonteCarlo, SparsityWithinBound) {
    const auto stats = mc_pruned_sparsity(300, 300, 2.0, 1.0, 20, RngHandle{82, 0});
    const auto bound = distributed_sparsity_bound(300, 300, 2.0, 2.0);
    for (const auto& s : stats) {
        EXPECT_LE(static_cast<double>(std::max(s.j_r, s.j_c)), bound.value);
        EXPECT_GE(s.j_r, 1u);
    }
}

TEST(MonteCarlo, KeepRateDecreasesInD) {
    const double a = mc_keep_rate(300, 300, 0.5, 1.0, RngHandle{83, 0});
    const double b = mc_keep_rate(300, 300, 2.0, 1.0, RngHandle{83, 0});
    const double c = mc_keep_rate(300, 300, 10.0, 1.0, RngHandle{83, 0});
    EXPECT_GT(a, b);
    EXPECT_GT(b, c);
}
