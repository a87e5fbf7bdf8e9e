#include "prunebound/stats.hpp"

#include "prunebound/errors.hpp"

#include <algorithm>
#include <cmath>

namespace prunebound {

namespace {
void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive and finite");
}
}  // namespace

MomentSet delta_moments(double d, double psi) {
    require_positive(d, "d");
    require_positive(psi, "psi");
    const double r = d / (d + 2.0);
    return {std::pow(r, 1.5) * psi, 3.0 * std::pow(r, 2.5) * psi * psi, d, psi};
}

double chi(double d) {
    require_positive(d, "d");
    // 1 - sqrt(d/(d+2)) written to avoid cancellation for large d.
    const double s = std::sqrt(d + 2.0);
    return 2.0 / (s * (s + std::sqrt(d)));
}

GammaBound latala_gamma(std::size_t d1, std::size_t d2, const MomentSet& moments, double C) {
    require_positive(C, "C");
    if (d1 == 0 || d2 == 0) throw ValidationError("latala_gamma: dimensions must be positive");
    const double a = static_cast<double>(d1);
    const double b = static_cast<double>(d2);
    const double g = C * (std::sqrt(moments.m2) * (std::sqrt(a) + std::sqrt(b)) + std::pow(a * b * moments.m4, 0.25));
    return {g, C, d1, d2};
}

double kappa_tau_probability(double d, double kappa) {
    require_positive(d, "d");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("kappa must lie in (0, 1)");
    return std::erf(std::sqrt(-d * std::log(kappa) / 2.0));
}

ValueWithProbability balls_bins_bound(std::size_t N, std::size_t n) {
    if (n == 0) throw ValidationError("balls_bins_bound: n must be positive");
    const double bins = static_cast<double>(n);
    return {3.0 * static_cast<double>(N) / bins, 1.0 - std::pow(bins, -1.0 / 3.0)};
}

ValueWithProbability distributed_sparsity_bound(std::size_t d1, std::size_t d2, double lambda, double d) {
    if (d1 == 0 || d2 == 0) throw ValidationError("distributed_sparsity_bound: dimensions must be positive");
    if (!(lambda >= 1.0)) throw ValidationError("distributed_sparsity_bound: lambda must be >= 1");
    const double a = static_cast<double>(d1);
    const double b = static_cast<double>(d2);
    return {3.0 * lambda * std::max(a, b) * chi(d),
            1.0 - 1.0 / lambda - std::pow(a, -1.0 / 3.0) - std::pow(b, -1.0 / 3.0)};
}

}  // namespace prunebound
