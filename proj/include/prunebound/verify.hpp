#pragma once

#include "prunebound/config.hpp"
#include "prunebound/rng.hpp"

#include <string>
#include <vector>

#include <json.hpp>

namespace prunebound {

// One Monte Carlo comparison. `z_score` is (estimate - closed_form) / se when
// a standard error exists, else 0.
struct Check {
    std::string name;
    double closed_form = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    double tolerance = 0.0;
    std::string rule;  // "z", "abs", "at_least" or "at_most"
    bool pass = false;
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(const Check& c);

// Checks mean 0, m2 and m4 of the pruning difference. `m2_scale` multiplies
// the closed-form m2 and exists so tests can confirm a wrong constant is caught.
std::vector<Check> verify_moments(double d, double psi, std::size_t samples, double z_tol, const RngHandle& rng,
                                  double m2_scale = 1.0);
Check verify_keep_rate(std::size_t dim, double d, double tol, const RngHandle& rng);
// Keep rates must strictly decrease along increasing d.
Check verify_keep_monotone(std::size_t dim, std::vector<double> ds, const RngHandle& rng);
// Fraction of trials with ||Delta||_2 <= eps Gamma, C calibrated to the trial mean.
Check verify_gamma(std::size_t dim, double d, double psi, double eps, std::size_t trials, const RngHandle& rng);
Check verify_balls_bins(std::size_t N, std::size_t n, std::size_t trials, const RngHandle& rng);
Check verify_sparsity(std::size_t dim, double d, double lambda, std::size_t trials, const RngHandle& rng);
Check verify_binomial_tail(std::size_t max_trials);
Check verify_erf();

struct VerifyReport {
    std::vector<Check> checks;
    bool all_pass = false;
    nlohmann::json json;
};

VerifyReport run_verify(const ExperimentConfig& cfg, double m2_scale = 1.0);

}  // namespace prunebound
