#pragma once

#include "prunebound/model.hpp"
#include "prunebound/stats.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prunebound {

// Per-layer slack terms and the data-level confidence/margin.
struct BoundBudget {
    std::vector<double> eps;     // Markov slack per layer
    std::vector<double> lambda;  // sparsity slack per layer
    double delta = 0.05;
    double gamma = 0.0;
    std::size_t n = 0;

    static BoundBudget uniform(std::size_t layers, double eps, double lambda, double delta, std::size_t n);
};

struct SubgaussianParams {
    double a = 1.0;
    double b = 1.0;
    std::vector<double> t;  // per layer
};

struct BoundValue {
    double value = 0.0;
    double complexity = 0.0;  // value minus the empirical loss, or the whole value
    double prob = 1.0;        // probability with which the statement holds
};

// Spectral norms of every weight matrix.
std::vector<double> layer_spectral_norms(const ModelStack& model);

// sqrt(d2) t when d2 <= d1, else 1.
double subgaussian_kappa(std::size_t d1, std::size_t d2, double t);

// n a exp(-b t^2 d1), the per-layer failure added by the subgaussian refinement.
double subgaussian_failure(std::size_t n, double a, double b, double t, std::size_t d1);

// e d10 (prod kappa_l L_l ||A_l||) sum ||U_l|| / ||A_l||. Requires
// ||U_l|| <= ||A_l|| / L; throws InfeasibleError naming the layer otherwise.
double perturbation_bound(std::span<const double> layer_norms, std::span<const double> lipschitz,
                          std::span<const double> perturbation_norms, std::size_t input_dim,
                          std::span<const double> kappa = {});
double perturbation_bound(const ModelStack& model, std::span<const double> perturbation_norms,
                          std::size_t input_dim);

// Output error of the pruned (and optionally discretized) model: the
// perturbation bound with ||U_l|| replaced by eps_l Gamma_l (+ rho_l J_l).
// prob = 1 - sum 1/eps_l (minus the subgaussian terms when given).
struct PruningErrorInputs {
    std::vector<double> layer_norms;
    std::vector<double> lipschitz;
    std::vector<double> gammas;
    std::vector<double> eps;
    std::optional<std::vector<double>> rhos;
    std::optional<std::vector<std::size_t>> Js;
    std::size_t input_dim = 0;
    std::optional<SubgaussianParams> subgaussian;
    std::vector<std::size_t> d1;  // needed with subgaussian
    std::vector<std::size_t> d2;
    std::size_t n = 0;            // sample count for the subgaussian failure term
};
BoundValue pruning_error_bound(const PruningErrorInputs& in);

// loss + sqrt(max(0, (ln J - ln delta) / 2) / n), J supplied as ln J.
double compression_bound(double ln_J, double delta, std::size_t n, double empirical_loss);

struct LayerDims {
    std::size_t d1 = 0;
    std::size_t d2 = 0;
};

// sum_l [ln C(d1 d2, alpha_l) + alpha_l ln(1/rho_l)].
double naive_complexity(std::span<const LayerDims> dims, std::span<const std::size_t> alphas,
                        std::span<const double> rhos);
double naive_bound(std::span<const LayerDims> dims, std::span<const std::size_t> alphas,
                   std::span<const double> rhos, std::size_t n, double empirical_loss);

struct SketchLayer {
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    std::size_t p = 0;
    double rho = 0.0;
};

// loss + sqrt(sum 3 lambda_l chi(d) d1 d2 ln^2 p_l ln(1/rho_l) / n),
// prob = 1 - sum(1/lambda_l + 1/eps_l + p_l^-2).
BoundValue sketch_gen_bound(std::span<const SketchLayer> layers, const BoundBudget& budget, double d,
                            double empirical_loss);

// loss + sqrt([n_M d01 ln^2 D_G + L n_M^2 ln^2 D_G] ln(1/rho) / n),
// prob = 1 - delta - L D_G^-2.
BoundValue imp_bound(double n_M, double d01, double D_G, double L, double rho, std::size_t n, double empirical_loss,
                     double delta);

// ||X||^2 ln(2 W^2) / eps^2 * prod(s_l^2 rho_l^2) * (sum (1/(d1_l s_l))^{2/3})^3.
double bartlett_covering(double xnorm, double W, double eps, std::span<const double> s,
                         std::span<const double> rho_lip, std::span<const std::size_t> d1);

// compression_bound with ln J = sum ln C(d1 d2, alpha_l) + ln_covering.
double covering_naive_bound(std::span<const LayerDims> dims, std::span<const std::size_t> alphas,
                            double ln_covering, double delta, std::size_t n, double empirical_loss);

// Natural logs of the complexity terms of three norm-based bounds:
//   neyshabur2015: 2^L prod ||A||_F / (gamma sqrt n)
//   bartlett2017:  prod ||A||_2 (sum (||A^T||_{2,1}/||A||_2)^{2/3})^{3/2} ||X||_F / (gamma n)
//   neyshabur2017: prod ||A||_2 sqrt(B^2 L^2 h ln(L h) sum ||A||_F^2/||A||_2^2) / (gamma sqrt n),
//                  B the largest input norm, h the most output units of any layer
std::map<std::string, double> baseline_bounds(const ModelStack& model, const Dataset& data, double gamma);

// Largest d in [d_min, d_max] with eps_l Gamma_l(d) <= fraction * ||A_l|| / L
// for every layer, by bisection on ln d. Throws InfeasibleError when even
// d_min fails.
double choose_pruning_strength(std::span<const double> layer_norms, std::span<const LayerDims> dims,
                               std::span<const double> psi, std::span<const double> eps, double C, double fraction,
                               double d_min = 1e-12, double d_max = 1e12);

}  // namespace prunebound
