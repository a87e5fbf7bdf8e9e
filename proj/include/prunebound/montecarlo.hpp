#pragma once

#include "prunebound/pruning.hpp"
#include "prunebound/rng.hpp"

#include <cstddef>
#include <vector>

namespace prunebound {

// Estimates of E[D], E[D^2], E[D^4] for one pruned entry D = A_hat - A with
// A ~ N(0, psi), plus their standard errors.
struct MomentEstimate {
    double mean = 0.0;
    double m2 = 0.0;
    double m4 = 0.0;
    double se_mean = 0.0;
    double se_m2 = 0.0;
    double se_m4 = 0.0;
    std::size_t samples = 0;
};

// Samples are processed in fixed blocks whose partial sums are combined in
// block order, so the result does not depend on the thread count.
MomentEstimate mc_delta_moments(double d, double psi, std::size_t samples, const RngHandle& rng);

// Off-diagonal keep fraction of one pruned rows x cols Gaussian layer.
double mc_keep_rate(std::size_t rows, std::size_t cols, double d, double psi, const RngHandle& rng);

// ||A_hat - A||_2 for `trials` independent Gaussian layers; trial t uses rng.derive(t).
std::vector<double> mc_delta_spectral_norms(std::size_t rows, std::size_t cols, double d, double psi,
                                            std::size_t trials, const RngHandle& rng);

// Smallest C with mean(norms) <= C * gamma_at_unit_C.
double calibrate_C(const std::vector<double>& norms, double gamma_at_unit_C);

// Maximum bin load of N balls thrown uniformly into n bins, per trial.
std::vector<std::size_t> mc_balls_bins(std::size_t N, std::size_t n, std::size_t trials, const RngHandle& rng);

// Sparsity statistics of pruned Gaussian layers, per trial.
std::vector<SparsityStats> mc_pruned_sparsity(std::size_t rows, std::size_t cols, double d, double psi,
                                              std::size_t trials, const RngHandle& rng);

namespace serial {
MomentEstimate mc_delta_moments(double d, double psi, std::size_t samples, const RngHandle& rng);
std::vector<std::size_t> mc_balls_bins(std::size_t N, std::size_t n, std::size_t trials, const RngHandle& rng);
}  // namespace serial

}  // namespace prunebound
