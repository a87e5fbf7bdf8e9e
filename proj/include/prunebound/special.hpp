#pragma once

#include <cstdint>

namespace prunebound {

// ln C(n, k) through lgamma; never forms the binomial itself.
double log_binomial(double n, double k);

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

double erf_fn(double x);

// P(Binomial(trials, p) >= threshold) = I_p(threshold, trials - threshold + 1).
double binomial_tail_via_beta(std::uint64_t trials, std::uint64_t threshold, double p);

}  // namespace prunebound
