#pragma once

#include "prunebound/matrix.hpp"
#include "prunebound/model.hpp"
#include "prunebound/rng.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace prunebound {

struct PruneParams {
    double d = 2.0;                          // pruning strength
    double psi = 1.0;                        // assumed weight variance
    std::optional<std::vector<double>> layer_psi;  // per-layer override of psi
    RngHandle seed{};
};

struct SparsityStats {
    std::size_t J = 0;    // ones in the mask
    std::size_t j_r = 0;  // max ones in any column
    std::size_t j_c = 0;  // max ones in any row
    bool operator==(const SparsityStats&) const = default;
};

struct PruneOutcome {
    ModelStack pruned;
    std::vector<Matrix> masks;  // 1 = kept
    std::vector<std::size_t> nnz;
    std::vector<std::size_t> max_col_nnz;
    std::vector<std::size_t> max_row_nnz;
    RngHandle seed{};
};

// Keep mask for one matrix. Off-diagonal entry (i, j) is pruned when a
// uniform draw falls below exp(-a^2 / (d psi)); the draws are taken from
// `stream` in row-major order over off-diagonal entries only, so the k-th
// off-diagonal entry always uses draw k. Entries (i, i) with
// i < min(rows, cols) are always kept.
Matrix prune_mask(const Matrix& a, double d, double psi, const RngHandle& stream);

// Index of off-diagonal entry (i, j) in the draw order above.
std::size_t offdiag_index(std::size_t i, std::size_t j, std::size_t rows, std::size_t cols);

// Layer l draws from params.seed.derive(l).
PruneOutcome mbp_prune(const ModelStack& model, const PruneParams& params);

// Rounds every entry to the nearest multiple of rho[l], ties away from zero.
// Zeros stay exactly zero.
ModelStack discretize(const PruneOutcome& outcome, const std::vector<double>& rho);
double round_to_grid(double v, double rho);

// ((layer_norm / L) - eps_gamma) / J, throwing InfeasibleError unless positive.
double choose_rho(double layer_norm, std::size_t L, double eps_gamma, std::size_t J, std::size_t layer = 0);

SparsityStats sparsity_stats(const Matrix& mask);

// Unbiased sample variance of the entries.
double estimate_psi(const Matrix& m);

namespace serial {
Matrix prune_mask(const Matrix& a, double d, double psi, const RngHandle& stream);
}

}  // namespace prunebound
