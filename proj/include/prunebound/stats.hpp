#pragma once

#include <cstddef>

namespace prunebound {

// Moments of one entry of the pruning difference for A ~ N(0, psi).
struct MomentSet {
    double m2 = 0.0;
    double m4 = 0.0;
    double d = 0.0;
    double psi = 0.0;
};

struct GammaBound {
    double gamma_l = 0.0;
    double C = 1.0;
    std::size_t d1 = 0;
    std::size_t d2 = 0;
};

struct ValueWithProbability {
    double value = 0.0;
    double prob = 0.0;
};

// m2 = d^{3/2} psi / (d+2)^{3/2},  m4 = 3 d^{5/2} psi^2 / (d+2)^{5/2}.
MomentSet delta_moments(double d, double psi);

// Expected off-diagonal keep fraction (sqrt(d+2) - sqrt(d)) / sqrt(d+2).
double chi(double d);

// C [ sqrt(m2) (sqrt(d1) + sqrt(d2)) + (d1 d2 m4)^{1/4} ].
GammaBound latala_gamma(std::size_t d1, std::size_t d2, const MomentSet& moments, double C = 1.0);

// erf(sqrt(-d ln(kappa) / 2)), the chance that a single weight's keep
// probability clears kappa.
double kappa_tau_probability(double d, double kappa);

// Max load of N balls in n bins is at most 3N/n with probability 1 - n^{-1/3}.
ValueWithProbability balls_bins_bound(std::size_t N, std::size_t n);

// max(j_r, j_c) <= 3 lambda max(d1, d2) chi(d) with probability
// 1 - 1/lambda - d1^{-1/3} - d2^{-1/3}.
ValueWithProbability distributed_sparsity_bound(std::size_t d1, std::size_t d2, double lambda, double d);

}  // namespace prunebound
