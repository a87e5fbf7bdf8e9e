#include "prunebound/linalg.hpp"

#include "prunebound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace prunebound {

namespace {

// y = G v where G is the Gram matrix on the smaller side of m.
void gram_apply(const Matrix& m, bool use_rows, std::span<const double> v, std::vector<double>& tmp,
                std::vector<double>& out) {
    if (use_rows) {
        // G = m m^T (rows x rows)
        tmp = multiply_transposed(m, v);
        out = multiply(m, tmp);
    } else {
        // G = m^T m (cols x cols)
        tmp = multiply(m, v);
        out = multiply_transposed(m, tmp);
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

SpectralEstimate spectral_norm_estimate(const Matrix& m, const PowerIterationOptions& opts) {
    if (m.empty()) throw ValidationError("spectral_norm: empty matrix");
    if (!(opts.tol > 0.0)) throw ValidationError("spectral_norm: tol must be positive");
    if (opts.max_iter == 0) throw ValidationError("spectral_norm: max_iter must be positive");

    const bool use_rows = m.rows() < m.cols();
    const std::size_t n = use_rows ? m.rows() : m.cols();

    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = normal_at(opts.rng, i);
    double nv = euclidean_norm(v);
    for (auto& x : v) x /= nv;

    SpectralEstimate est;
    if (frobenius_norm(m) == 0.0) {
        est.vector = std::move(v);
        return est;
    }

    std::vector<double> tmp, gv;
    double lambda = 0.0;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        gram_apply(m, use_rows, v, tmp, gv);
        const double next = dot(v, gv);  // Rayleigh quotient, ||v|| = 1
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = gv[i] - next * v[i];
        est.residual = next > 0.0 ? euclidean_norm(r) / next : 0.0;

        const double gnorm = euclidean_norm(gv);
        if (gnorm == 0.0) {
            // Start vector landed in the null space; the Gram is nonzero so restart along e_0.
            std::fill(v.begin(), v.end(), 0.0);
            v[it % n] = 1.0;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) v[i] = gv[i] / gnorm;

        const bool converged = it > 1 && std::abs(next - lambda) <= opts.tol * std::abs(next);
        lambda = next;
        est.iterations = it;
        if (converged) {
            est.value = std::sqrt(std::max(lambda, 0.0));
            if (!use_rows) {
                est.vector = v;
            } else {
                est.vector = multiply_transposed(m, v);
                const double s = euclidean_norm(est.vector);
                if (s > 0.0)
                    for (auto& x : est.vector) x /= s;
            }
            return est;
        }
    }
    throw ConvergenceError("spectral_norm: power iteration did not converge in " +
                               std::to_string(opts.max_iter) + " iterations (last estimate " +
                               std::to_string(std::sqrt(std::max(lambda, 0.0))) + ")",
                           est.residual, opts.max_iter);
}

double spectral_norm(const Matrix& m, const PowerIterationOptions& opts) {
    return spectral_norm_estimate(m, opts).value;
}

SymmetricEigen symmetric_eigen(const Matrix& s, double tol, std::size_t max_sweeps) {
    if (s.rows() != s.cols()) throw DimensionError("symmetric_eigen: matrix must be square");
    const std::size_t n = s.rows();
    Matrix a = s;
    Matrix v = Matrix::identity(n);

    auto off_norm = [&] {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        return std::sqrt(off);
    };
    const double scale_ref = std::max(frobenius_norm(a), 1e-300);

    for (std::size_t sweep = 0; sweep < max_sweeps && off_norm() > tol * scale_ref; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

Matrix pseudo_inverse_psd(const Matrix& s, double rel_cutoff, std::size_t* rank) {
    const auto eig = symmetric_eigen(s);
    const std::size_t n = s.rows();
    const double top = eig.values.empty() ? 0.0 : std::max(eig.values.back(), 0.0);
    Matrix out(n, n);
    std::size_t r = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double lam = eig.values[j];
        if (top == 0.0 || lam <= rel_cutoff * top) continue;
        ++r;
        const double inv = 1.0 / lam;
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = eig.vectors(i, j) * inv;
            for (std::size_t k = 0; k < n; ++k) out(i, k) += vi * eig.vectors(k, j);
        }
    }
    if (rank) *rank = r;
    return out;
}

std::optional<std::vector<double>> cholesky_solve(const Matrix& s, std::span<const double> b,
                                                  double rel_pivot) {
    const std::size_t n = s.rows();
    if (s.cols() != n || b.size() != n) throw DimensionError("cholesky_solve: shape mismatch");
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, s(i, i));
    if (max_diag <= 0.0) return std::nullopt;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= rel_pivot * max_diag) return std::nullopt;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double x = s(i, j);
            for (std::size_t k = 0; k < j; ++k) x -= l(i, k) * l(j, k);
            l(i, j) = x / ljj;
        }
    }
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = b[i];
        for (std::size_t k = 0; k < i; ++k) t -= l(i, k) * y[k];
        y[i] = t / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double t = y[i];
        for (std::size_t k = i + 1; k < n; ++k) t -= l(k, i) * x[k];
        x[i] = t / l(i, i);
    }
    return x;
}

}  // namespace prunebound
