#include "prunebound/pruning.hpp"

#include "prunebound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prunebound {

namespace {

void check_params(double d, double psi) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("pruning strength d must be positive");
    if (!(psi > 0.0) || !std::isfinite(psi)) throw ValidationError("psi must be positive");
}

void prune_row(const Matrix& a, Matrix& mask, std::size_t i, double scale, const RngHandle& stream) {
    const std::size_t cols = a.cols();
    const std::size_t diag = std::min(a.rows(), a.cols());
    std::size_t k = offdiag_index(i, 0, a.rows(), cols);
    for (std::size_t j = 0; j < cols; ++j) {
        if (i == j && i < diag) {
            mask(i, j) = 1.0;
            continue;
        }
        const double v = a(i, j);
        const double prune_prob = std::exp(-v * v * scale);
        mask(i, j) = uniform_at(stream, k++) < prune_prob ? 0.0 : 1.0;
    }
}

}  // namespace

std::size_t offdiag_index(std::size_t i, std::size_t j, std::size_t rows, std::size_t cols) {
    const std::size_t diag = std::min(rows, cols);
    // Diagonal entries that precede (i, j) in row-major order.
    std::size_t before = std::min(i, diag);
    if (i < diag && j > i) ++before;
    return i * cols + j - before;
}

Matrix prune_mask(const Matrix& a, double d, double psi, const RngHandle& stream) {
    check_params(d, psi);
    Matrix mask(a.rows(), a.cols());
    const double scale = 1.0 / (d * psi);
    const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) prune_row(a, mask, static_cast<std::size_t>(i), scale, stream);
    return mask;
}

namespace serial {
Matrix prune_mask(const Matrix& a, double d, double psi, const RngHandle& stream) {
    check_params(d, psi);
    Matrix mask(a.rows(), a.cols());
    const double scale = 1.0 / (d * psi);
    for (std::size_t i = 0; i < a.rows(); ++i) prune_row(a, mask, i, scale, stream);
    return mask;
}
}  // namespace serial

PruneOutcome mbp_prune(const ModelStack& model, const PruneParams& params) {
    if (params.layer_psi && params.layer_psi->size() != model.depth())
        throw DimensionError("mbp_prune: layer_psi must have one entry per layer");
    PruneOutcome out;
    out.seed = params.seed;
    std::vector<Matrix> weights;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        const Matrix& a = model.layer(l).weights;
        const double psi = params.layer_psi ? (*params.layer_psi)[l] : params.psi;
        Matrix mask = prune_mask(a, params.d, psi, params.seed.derive(l));
        const auto st = sparsity_stats(mask);
        out.nnz.push_back(st.J);
        out.max_col_nnz.push_back(st.j_r);
        out.max_row_nnz.push_back(st.j_c);
        weights.push_back(hadamard(a, mask));
        out.masks.push_back(std::move(mask));
    }
    out.pruned = model.with_weights(std::move(weights));
    return out;
}

double round_to_grid(double v, double rho) {
    if (v == 0.0) return 0.0;
    const double q = std::abs(v) / rho;
    double whole = std::floor(q);
    // Quotients within a few ulps of a half are ties, so 0.25 / 0.1 rounds up.
    if (q - whole >= 0.5 - 1e-9 * std::max(1.0, q)) whole += 1.0;
    return std::copysign(whole * rho, v);
}

ModelStack discretize(const PruneOutcome& outcome, const std::vector<double>& rho) {
    const ModelStack& model = outcome.pruned;
    if (rho.size() != model.depth()) throw DimensionError("discretize: one rho per layer required");
    std::vector<Matrix> weights;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        if (!(rho[l] > 0.0) || !std::isfinite(rho[l]))
            throw ValidationError("discretize: rho must be positive at layer " + std::to_string(l));
        Matrix w = model.layer(l).weights;
        for (auto& v : w.data()) v = round_to_grid(v, rho[l]);
        weights.push_back(std::move(w));
    }
    return model.with_weights(std::move(weights));
}

double choose_rho(double layer_norm, std::size_t L, double eps_gamma, std::size_t J, std::size_t layer) {
    if (!std::isfinite(layer_norm) || !std::isfinite(eps_gamma)) throw ValidationError("choose_rho: non-finite input");
    if (L == 0 || J == 0) throw ValidationError("choose_rho: L and J must be positive");
    if (eps_gamma < 0.0) throw ValidationError("choose_rho: eps*Gamma must be non-negative");
    const double rho = (layer_norm / static_cast<double>(L) - eps_gamma) / static_cast<double>(J);
    if (!(rho > 0.0)) {
        throw InfeasibleError("layer " + std::to_string(layer) +
                                  ": pruning error budget exhausted (eps*Gamma >= ||A||/L)",
                              layer);
    }
    return rho;
}

SparsityStats sparsity_stats(const Matrix& mask) {
    SparsityStats st;
    std::vector<std::size_t> col(mask.cols(), 0);
    for (std::size_t i = 0; i < mask.rows(); ++i) {
        std::size_t row = 0;
        for (std::size_t j = 0; j < mask.cols(); ++j) {
            const double v = mask(i, j);
            if (v == 1.0) {
                ++row;
                ++col[j];
            } else if (v != 0.0) {
                throw ValidationError("sparsity_stats: mask entries must be 0 or 1");
            }
        }
        st.J += row;
        st.j_c = std::max(st.j_c, row);
    }
    for (auto c : col) st.j_r = std::max(st.j_r, c);
    return st;
}

double estimate_psi(const Matrix& m) {
    if (m.size() < 2) throw ValidationError("estimate_psi: need at least two entries");
    double mean = 0.0;
    for (double v : m.data()) mean += v;
    mean /= static_cast<double>(m.size());
    double ss = 0.0;
    for (double v : m.data()) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(m.size() - 1);
    if (!(var > 0.0)) throw ValidationError("estimate_psi: entries have zero variance");
    return var;
}

}  // namespace prunebound
