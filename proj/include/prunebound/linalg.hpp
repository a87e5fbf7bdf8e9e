#pragma once

#include "prunebound/matrix.hpp"
#include "prunebound/rng.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace prunebound {

struct PowerIterationOptions {
    double tol = 1e-9;
    std::size_t max_iter = 1000;
    RngHandle rng{0x5eed, 0};
};

// Iteration budget for random matrices, whose top two singular values can
// nearly tie and need well over the default 1000 steps.
inline constexpr std::size_t kRandomMatrixMaxIter = 20000;

struct SpectralEstimate {
    double value = 0.0;           // largest singular value
    std::vector<double> vector;   // right singular vector estimate (unit)
    std::size_t iterations = 0;
    double residual = 0.0;        // ||G v - lambda v|| / lambda on the Gram side
};

// Largest singular value by power iteration on the smaller Gram matrix
// (m^T m or m m^T) from a seeded random start. Throws ConvergenceError,
// carrying the last residual, when the relative change in the Rayleigh
// quotient stays above tol for max_iter steps.
SpectralEstimate spectral_norm_estimate(const Matrix& m, const PowerIterationOptions& opts = {});
double spectral_norm(const Matrix& m, const PowerIterationOptions& opts = {});

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are eigenvectors
};

// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& s, double tol = 1e-14, std::size_t max_sweeps = 100);

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix; eigenvalues below
// rel_cutoff * max eigenvalue are treated as zero. Also reports the rank.
Matrix pseudo_inverse_psd(const Matrix& s, double rel_cutoff = 1e-12, std::size_t* rank = nullptr);

// Solves S x = b for symmetric positive definite S. Returns nullopt when a
// pivot falls below rel_pivot * max diagonal.
std::optional<std::vector<double>> cholesky_solve(const Matrix& s, std::span<const double> b,
                                                  double rel_pivot = 1e-12);

}  // namespace prunebound
