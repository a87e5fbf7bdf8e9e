#include "prunebound/sketch.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/kernels.hpp"
#include "prunebound/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace prunebound {

std::size_t sketch_dim(std::size_t j, std::size_t d1, std::size_t d2, std::size_t p, double c_m) {
    if (j == 0 || d1 == 0 || d2 == 0) throw ValidationError("sketch_dim: j, d1, d2 must be positive");
    if (p != std::max(d1, d2)) throw ValidationError("sketch_dim: p must equal max(d1, d2)");
    if (!(c_m > 0.0) || !std::isfinite(c_m)) throw ValidationError("sketch_dim: c_m must be positive");
    const double jd = static_cast<double>(j) * static_cast<double>(std::max(d1, d2));
    const double raw = std::ceil(c_m * std::sqrt(jd) * std::log(static_cast<double>(p)));
    if (raw >= static_cast<double>(p)) return p;
    return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

std::size_t default_degree(std::size_t p) {
    if (p == 0) throw ValidationError("default_degree: p must be positive");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(p)))));
}

BipartiteEnsemble BipartiteEnsemble::from_adjacency(Matrix adjacency, std::size_t degree, RngHandle seed) {
    if (adjacency.empty()) throw ValidationError("ensemble: empty adjacency");
    if (degree == 0 || degree > adjacency.cols()) throw ValidationError("ensemble: degree must lie in [1, p]");
    for (std::size_t r = 0; r < adjacency.rows(); ++r) {
        std::size_t ones = 0;
        for (double v : adjacency.row(r)) {
            if (v == 1.0) ++ones;
            else if (v != 0.0) throw ValidationError("ensemble: adjacency must be 0/1");
        }
        if (ones > degree) throw ValidationError("ensemble: row " + std::to_string(r) + " exceeds the degree");
    }
    return {std::move(adjacency), degree, seed};
}

BipartiteEnsemble draw_ensemble(std::size_t m, std::size_t p, std::size_t degree, const RngHandle& rng) {
    if (m == 0 || p == 0) throw ValidationError("draw_ensemble: m and p must be positive");
    if (m > p) throw ValidationError("draw_ensemble: m must not exceed p");
    if (degree == 0 || degree > p) throw ValidationError("draw_ensemble: degree must lie in [1, p]");
    Matrix adj(m, p);
    std::vector<std::size_t> idx(p);
    for (std::size_t r = 0; r < m; ++r) {
        std::iota(idx.begin(), idx.end(), 0);
        Rng g(rng.derive(r));
        for (std::size_t k = 0; k < degree; ++k) {
            std::swap(idx[k], idx[k + g.below(p - k)]);
            adj(r, idx[k]) = 1.0;
        }
    }
    return {std::move(adj), degree, rng};
}

BipartiteEnsemble sketch_ensemble(std::size_t m, std::size_t p, std::size_t degree, const RngHandle& rng) {
    if (m == p && p > 0) return BipartiteEnsemble::from_adjacency(Matrix::identity(p), 1, rng);
    return draw_ensemble(m, p, degree, rng);
}

SketchPair sketch(const Matrix& X, const BipartiteEnsemble& A, const BipartiteEnsemble& B) {
    if (A.p() != X.rows() || B.p() != X.cols())
        throw DimensionError("sketch: A must have X.rows() columns and B X.cols() columns");
    return {A, B, kernels::gemm_nt(kernels::gemm_nn(A.adjacency, X), B.adjacency)};
}

std::size_t parameter_count(const SketchPair& pair) { return pair.A.m() * pair.B.m(); }

namespace {

Matrix apply(const Matrix& A, const Matrix& V, const Matrix& B) {
    return kernels::gemm_nt(kernels::gemm_nn(A, V), B);
}

double shrink(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

struct Candidate {
    Matrix X;
    double residual = 0.0;
    bool certified = false;
};

// Least squares restricted to `support`, then a dual certificate: the
// minimum-norm W with (A^T W B)_S = sign(X_S) must satisfy |A^T W B| <= 1
// off the support.
std::optional<Candidate> polish(const Matrix& A, const Matrix& B, const Matrix& Y, const Matrix& GtA,
                                const Matrix& GtB, const Matrix& PA, const Matrix& PB,
                                const std::vector<std::pair<std::size_t, std::size_t>>& support, double tol,
                                const Matrix* dual_hint) {
    const std::size_t s = support.size();
    if (s == 0 || s > Y.size()) return std::nullopt;
    Matrix N(s, s);
    for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b)
            N(a, b) = GtA(support[a].first, support[b].first) * GtB(support[a].second, support[b].second);
    const Matrix AtYB = kernels::gemm_nn(kernels::gemm_tn(A, Y), B);
    std::vector<double> rhs(s);
    for (std::size_t a = 0; a < s; ++a) rhs[a] = AtYB(support[a].first, support[a].second);
    const auto sol = cholesky_solve(N, rhs);
    if (!sol) return std::nullopt;

    Candidate c;
    c.X = Matrix(A.cols(), B.cols());
    for (std::size_t a = 0; a < s; ++a) c.X(support[a].first, support[a].second) = (*sol)[a];
    c.residual = frobenius_norm(subtract(apply(A, c.X, B), Y));
    if (!(c.residual <= tol)) return std::nullopt;

    std::vector<double> sign(s);
    for (std::size_t a = 0; a < s; ++a) {
        const double v = (*sol)[a];
        if (v == 0.0) return c;
        sign[a] = v > 0.0 ? 1.0 : -1.0;
    }
    // Start from the ADMM dual estimate mapped into the range of A^T . B, then
    // add the minimum-norm correction that makes it match the signs on S.
    Matrix Q0(A.cols(), B.cols());
    if (dual_hint) Q0 = kernels::gemm_nn(kernels::gemm_nn(PA, apply(A, *dual_hint, B)), PB);
    for (std::size_t a = 0; a < s; ++a) sign[a] -= Q0(support[a].first, support[a].second);
    const auto coef = cholesky_solve(N, sign);
    if (!coef) return c;
    Matrix Cm(A.cols(), B.cols());
    for (std::size_t a = 0; a < s; ++a) Cm(support[a].first, support[a].second) = (*coef)[a];
    const Matrix Q = add(Q0, kernels::gemm_nn(kernels::gemm_nn(GtA, Cm), GtB));
    for (std::size_t a = 0; a < s; ++a) sign[a] += Q0(support[a].first, support[a].second);
    constexpr double slack = 1e-9;
    for (std::size_t i = 0; i < Q.rows(); ++i)
        for (std::size_t j = 0; j < Q.cols(); ++j)
            if (c.X(i, j) == 0.0 && std::abs(Q(i, j)) > 1.0 + slack) return c;
    // On the support Q reproduces the signs up to round-off.
    for (std::size_t a = 0; a < s; ++a)
        if (std::abs(Q(support[a].first, support[a].second) - sign[a]) > 1e-6) return c;
    c.certified = true;
    return c;
}

std::vector<std::pair<std::size_t, std::size_t>> support_of(const Matrix& Z) {
    std::vector<std::pair<std::size_t, std::size_t>> s;
    for (std::size_t i = 0; i < Z.rows(); ++i)
        for (std::size_t j = 0; j < Z.cols(); ++j)
            if (Z(i, j) != 0.0) s.emplace_back(i, j);
    return s;
}

}  // namespace

RecoverResult recover_detailed(const SketchPair& pair, const RecoverOptions& opts) {
    const Matrix& A = pair.A.adjacency;
    const Matrix& B = pair.B.adjacency;
    const Matrix& Y = pair.Y;
    if (Y.rows() != A.rows() || Y.cols() != B.rows()) throw DimensionError("recover: Y shape does not match A, B");
    if (!(opts.tol > 0.0)) throw ValidationError("recover: tol must be positive");
    if (opts.max_iter == 0) throw ValidationError("recover: max_iter must be positive");

    std::size_t rank_a = 0;
    std::size_t rank_b = 0;
    const Matrix PA = kernels::gemm_tn(A, pseudo_inverse_psd(kernels::gemm_nt(A, A), 1e-12, &rank_a));  // A^T GA^+
    const Matrix PB = kernels::gemm_nn(pseudo_inverse_psd(kernels::gemm_nt(B, B), 1e-12, &rank_b), B);  // GB^+ B
    auto project = [&](const Matrix& V) {
        const Matrix r = subtract(apply(A, V, B), Y);
        return subtract(V, kernels::gemm_nn(kernels::gemm_nn(PA, r), PB));
    };

    // Residuals are measured against tol * max(1, ||Y||_F).
    const double feas_tol = opts.tol * std::max(1.0, frobenius_norm(Y));
    Matrix x = kernels::gemm_nn(kernels::gemm_nn(PA, Y), PB);
    const double base_residual = frobenius_norm(subtract(apply(A, x, B), Y));
    if (!(base_residual <= feas_tol))
        throw ConvergenceError("recover: sketch is not in the range of the sketch operator", base_residual, 0);
    if (rank_a == A.cols() && rank_b == B.cols()) return {x, 0, base_residual, true};

    const Matrix GtA = kernels::gemm_tn(A, A);
    const Matrix GtB = kernels::gemm_tn(B, B);

    double rho = 1.0;
    {
        const double scale = l1_norm(x) / static_cast<double>(x.size());
        if (scale > 0.0) rho = 1.0 / scale;
    }
    Matrix z(x.rows(), x.cols());
    for (std::size_t k = 0; k < x.size(); ++k) z.data()[k] = shrink(x.data()[k], 1.0 / rho);
    Matrix u(x.rows(), x.cols());
    std::vector<std::pair<std::size_t, std::size_t>> last_support;

    constexpr std::size_t kMaxRhoUpdates = 40;
    std::size_t rho_updates = 0;
    const double n_sqrt = std::sqrt(static_cast<double>(x.size()));
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        x = project(subtract(z, u));
        const Matrix z_old = z;
        for (std::size_t k = 0; k < z.size(); ++k) z.data()[k] = shrink(x.data()[k] + u.data()[k], 1.0 / rho);
        double r2 = 0.0;
        double s2 = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double rk = x.data()[k] - z.data()[k];
            u.data()[k] += rk;
            r2 += rk * rk;
            const double sk = z.data()[k] - z_old.data()[k];
            s2 += sk * sk;
        }
        const double r = std::sqrt(r2);
        const double s = rho * std::sqrt(s2);

        if (it % opts.certify_every == 0) {
            auto support = support_of(z);
            if (support != last_support || it % (4 * opts.certify_every) == 0) {
                const Matrix dual = scale(u, rho);
                if (auto c = polish(A, B, Y, GtA, GtB, PA, PB, support, feas_tol, &dual); c && c->certified)
                    return {std::move(c->X), it, c->residual, true};
                last_support = std::move(support);
            }
        }

        const double eps_pri = n_sqrt * opts.tol * 1e-2 + 1e-12 * std::max(frobenius_norm(x), frobenius_norm(z));
        const double eps_dual = n_sqrt * opts.tol * 1e-2 + 1e-12 * rho * frobenius_norm(u);
        if (r <= eps_pri && s <= eps_dual) {
            RecoverResult out{x, it, frobenius_norm(subtract(apply(A, x, B), Y)), false};
            const Matrix dual = scale(u, rho);
            if (auto c = polish(A, B, Y, GtA, GtB, PA, PB, support_of(z), feas_tol, &dual);
                c && l1_norm(c->X) <= l1_norm(x)) {
                out.X = std::move(c->X);
                out.residual = c->residual;
                out.certified = c->certified;
            }
            return out;
        }

        // Residual balancing keeps the two residuals within a factor of 10.
        // It stops after a fixed number of updates, since an endlessly varying
        // rho can cycle instead of converging.
        if (rho_updates >= kMaxRhoUpdates) continue;
        if (r > 10.0 * s) {
            ++rho_updates;
            rho *= 2.0;
            for (auto& v : u.data()) v /= 2.0;
        } else if (s > 10.0 * r) {
            ++rho_updates;
            rho /= 2.0;
            for (auto& v : u.data()) v *= 2.0;
        }
    }
    const double residual = frobenius_norm(subtract(x, z));
    throw ConvergenceError("recover: ADMM did not converge within " + std::to_string(opts.max_iter) + " iterations",
                           residual, opts.max_iter);
}

Matrix recover(const SketchPair& pair, double tol, std::size_t max_iter) {
    RecoverOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return recover_detailed(pair, opts).X;
}

}  // namespace prunebound

namespace prunebound {

Matrix random_distributed_sparse(std::size_t p, std::size_t j, const RngHandle& rng) {
    if (p == 0 || j == 0) throw ValidationError("random_distributed_sparse: p and j must be positive");
    Matrix pattern = Matrix::identity(p);
    std::vector<std::size_t> perm(p);
    for (std::size_t t = 1; t < j; ++t) {
        std::iota(perm.begin(), perm.end(), 0);
        Rng g(rng.derive(t));
        for (std::size_t i = p; i > 1; --i) std::swap(perm[i - 1], perm[g.below(i)]);
        for (std::size_t i = 0; i < p; ++i) pattern(i, perm[i]) = 1.0;
    }
    Matrix X(p, p);
    const RngHandle values = rng.derive(0);
    for (std::size_t k = 0; k < X.size(); ++k) {
        if (pattern.data()[k] == 0.0) continue;
        const double g = normal_at(values, k);
        X.data()[k] = g + (g >= 0.0 ? 0.5 : -0.5);
    }
    return X;
}

}  // namespace prunebound
