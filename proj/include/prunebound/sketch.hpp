#pragma once

#include "prunebound/matrix.hpp"
#include "prunebound/rng.hpp"

#include <cstddef>
#include <vector>

namespace prunebound {

// m = min(p, ceil(c_m * sqrt(max(j d1, j d2)) * ln p)), at least 1. p must be max(d1, d2).
std::size_t sketch_dim(std::size_t j, std::size_t d1, std::size_t d2, std::size_t p, double c_m);

// ceil(ln p), at least 1.
std::size_t default_degree(std::size_t p);

struct BipartiteEnsemble {
    Matrix adjacency;  // m x p, 0/1
    std::size_t degree = 0;
    RngHandle seed{};

    std::size_t m() const { return adjacency.rows(); }
    std::size_t p() const { return adjacency.cols(); }
    // Validates 0/1 entries and the row-degree cap.
    static BipartiteEnsemble from_adjacency(Matrix adjacency, std::size_t degree, RngHandle seed = {});
};

// Each left node r connects to exactly `degree` distinct right nodes, chosen
// by a partial Fisher-Yates shuffle driven by rng.derive(r).
BipartiteEnsemble draw_ensemble(std::size_t m, std::size_t p, std::size_t degree, const RngHandle& rng);

// Ensemble used by the pipeline: the identity when m == p (a clamped sketch
// keeps X as is), otherwise draw_ensemble.
BipartiteEnsemble sketch_ensemble(std::size_t m, std::size_t p, std::size_t degree, const RngHandle& rng);

struct SketchPair {
    BipartiteEnsemble A;  // m_a x d1
    BipartiteEnsemble B;  // m_b x d2
    Matrix Y;             // A X B^T
};

SketchPair sketch(const Matrix& X, const BipartiteEnsemble& A, const BipartiteEnsemble& B);

struct RecoverOptions {
    double tol = 1e-8;
    std::size_t max_iter = 50000;
    std::size_t certify_every = 25;
};

struct RecoverResult {
    Matrix X;
    std::size_t iterations = 0;
    double residual = 0.0;  // ||A X B^T - Y||_F
    bool certified = false; // optimality proven by a dual certificate or injectivity
};

// Basis pursuit min ||X||_1 s.t. A X B^T = Y by ADMM with exact projection
// onto the constraint set. Periodically polishes on the current support and
// stops once a dual certificate proves the polished point optimal. Throws
// ConvergenceError when Y lies off the range of the sketch operator or the
// iteration budget runs out. The constraint tolerance is tol * max(1, ||Y||_F).
RecoverResult recover_detailed(const SketchPair& pair, const RecoverOptions& opts = {});
Matrix recover(const SketchPair& pair, double tol = 1e-8, std::size_t max_iter = 50000);

// m_a * m_b dense parameters.
std::size_t parameter_count(const SketchPair& pair);

}  // namespace prunebound

namespace prunebound {

// p x p matrix with a nonzero diagonal and at most j nonzeros in every row
// and column: the identity pattern overlaid with j - 1 random permutation
// patterns, values N(0, 1) shifted away from zero.
Matrix random_distributed_sparse(std::size_t p, std::size_t j, const RngHandle& rng);

}  // namespace prunebound
