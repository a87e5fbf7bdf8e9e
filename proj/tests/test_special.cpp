#include "prunebound/errors.hpp"
#include "prunebound/special.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace prunebound;

namespace {

// P(X >= k) by summing pmf terms built with the multiplicative recurrence in
// long double; no special functions involved.
double direct_tail(unsigned n, unsigned k, double p) {
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return 1.0;
    const long double q = 1.0L - p;
    long double pmf = std::pow(q, static_cast<long double>(n));
    long double tail = 0.0L;
    for (unsigned i = 0; i <= n; ++i) {
        if (i >= k) tail += pmf;
        pmf = pmf * static_cast<long double>(n - i) / static_cast<long double>(i + 1) * p / q;
    }
    return static_cast<double>(tail);
}

// Maclaurin series 2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1)).
double erf_series(double x) {
    long double term = x;
    long double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -static_cast<long double>(x) * x / n;
        sum += term / (2 * n + 1);
    }
    return static_cast<double>(2.0L / std::sqrt(3.14159265358979323846264338327950288L) * sum);
}

}  // namespace

TEST(BinomialTail, Examples) {
    EXPECT_NEAR(binomial_tail_via_beta(2, 1, 0.5), 0.75, 1e-15);
    EXPECT_EQ(binomial_tail_via_beta(17, 0, 0.3), 1.0);
    EXPECT_EQ(binomial_tail_via_beta(9, 9, 1.0), 1.0);
    EXPECT_EQ(binomial_tail_via_beta(9, 1, 0.0), 0.0);
    EXPECT_THROW(binomial_tail_via_beta(9, 10, 0.4), ValidationError);
}

TEST(BinomialTail, MatchesDirectSummation) {
    double worst = 0.0;
    for (unsigned n = 1; n <= 60; ++n)
        for (double p : {1e-3, 0.05, 0.2, 0.37, 0.5, 0.63, 0.8, 0.95, 0.999})
            for (unsigned k = 0; k <= n; ++k)
                worst = std::max(worst, std::abs(binomial_tail_via_beta(n, k, p) - direct_tail(n, k, p)));
    EXPECT_LE(worst, 1e-12);
}

TEST(BinomialTail, DomainErrors) {
    EXPECT_THROW(binomial_tail_via_beta(0, 0, 0.5), ValidationError);
    EXPECT_THROW(binomial_tail_via_beta(3, 1, 1.5), ValidationError);
    EXPECT_THROW(binomial_tail_via_beta(3, 1, -0.1), ValidationError);
}

TEST(IncompleteBeta, Identities) {
    EXPECT_NEAR(incomplete_beta(1, 1, 0.3), 0.3, 1e-15);
    EXPECT_NEAR(incomplete_beta(2, 3, 0.4) + incomplete_beta(3, 2, 0.6), 1.0, 1e-14);
    // I_x(a, 1) = x^a
    EXPECT_NEAR(incomplete_beta(4.5, 1, 0.7), std::pow(0.7, 4.5), 1e-14);
    EXPECT_EQ(incomplete_beta(2, 2, 0.0), 0.0);
    EXPECT_EQ(incomplete_beta(2, 2, 1.0), 1.0);
}

TEST(Erf, AgainstSeries) {
    EXPECT_NEAR(erf_fn(1.0), 0.842701, 1e-6);
    for (double x : {-2.0, -0.5, 0.0, 0.1, 0.5, 1.0, 1.7, 2.5, 3.0}) EXPECT_NEAR(erf_fn(x), erf_series(x), 1e-14) << x;
}

TEST(LogBinomial, SmallExactAndHuge) {
    EXPECT_NEAR(log_binomial(16, 2), std::log(120.0), 1e-12);
    EXPECT_NEAR(log_binomial(10, 0), 0.0, 1e-12);
    EXPECT_NEAR(log_binomial(10, 10), 0.0, 1e-12);
    const double v = log_binomial(1e6, 5e5);
    EXPECT_TRUE(std::isfinite(v));
    // Stirling: ln C(2m, m) ~ 2m ln 2 - 0.5 ln(pi m)
    EXPECT_NEAR(v, 1e6 * std::log(2.0) - 0.5 * std::log(M_PI * 5e5), 1e-5);
    EXPECT_THROW(log_binomial(5, 6), ValidationError);
}
