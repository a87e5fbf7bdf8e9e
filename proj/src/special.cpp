#include "prunebound/special.hpp"

#include "prunebound/errors.hpp"

#include <cmath>
#include <limits>

namespace prunebound {

namespace {

double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw ConvergenceError("incomplete_beta: continued fraction did not converge", std::abs(h), 10000);
}

}  // namespace

double log_binomial(double n, double k) {
    if (k < 0.0 || k > n) throw ValidationError("log_binomial: k must lie in [0, n]");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(ln_front) * beta_continued_fraction(a, b, x) / a;
    return 1.0 - std::exp(ln_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double erf_fn(double x) { return std::erf(x); }

double binomial_tail_via_beta(std::uint64_t trials, std::uint64_t threshold, double p) {
    if (trials == 0) throw ValidationError("binomial_tail_via_beta: trials must be positive");
    if (threshold > trials) throw ValidationError("binomial_tail_via_beta: threshold exceeds trials");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binomial_tail_via_beta: p must lie in [0, 1]");
    if (threshold == 0) return 1.0;
    return incomplete_beta(static_cast<double>(threshold), static_cast<double>(trials - threshold + 1), p);
}

}  // namespace prunebound
