#include "prunebound/kernels.hpp"

#include "prunebound/errors.hpp"

#include <cstddef>
#include <string>

namespace prunebound::kernels {

namespace {

void check_inner(std::size_t a, std::size_t b, const char* where) {
    if (a != b) {
        throw DimensionError(std::string(where) + ": inner dimensions " + std::to_string(a) + " and " +
                             std::to_string(b) + " differ");
    }
}

// Row i of C = A B, accumulated as axpy over rows of B.
inline void nn_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    double* out = c.row(i).data();
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.cols(); ++k) {
        const double s = a(i, k);
        if (s == 0.0) continue;
        const double* br = b.row(k).data();
        for (std::size_t j = 0; j < n; ++j) out[j] += s * br[j];
    }
}

// Row i of C = A^T B: sum over r of A(r, i) * B(r, :).
inline void tn_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    double* out = c.row(i).data();
    const std::size_t n = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double s = a(r, i);
        if (s == 0.0) continue;
        const double* br = b.row(r).data();
        for (std::size_t j = 0; j < n; ++j) out[j] += s * br[j];
    }
}

}  // namespace

Matrix gemm_nn(const Matrix& a, const Matrix& b) {
    check_inner(a.cols(), b.rows(), "gemm_nn");
    Matrix c(a.rows(), b.cols());
    const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) nn_row(a, b, c, static_cast<std::size_t>(i));
    return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
    check_inner(a.rows(), b.rows(), "gemm_tn");
    Matrix c(a.cols(), b.cols());
    const auto rows = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) tn_row(a, b, c, static_cast<std::size_t>(i));
    return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
    check_inner(a.cols(), b.cols(), "gemm_nt");
    const Matrix bt = transpose(b);
    return gemm_nn(a, bt);
}

namespace serial {

Matrix gemm_nn(const Matrix& a, const Matrix& b) {
    check_inner(a.cols(), b.rows(), "gemm_nn");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) nn_row(a, b, c, i);
    return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
    check_inner(a.rows(), b.rows(), "gemm_tn");
    Matrix c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) tn_row(a, b, c, i);
    return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
    check_inner(a.cols(), b.cols(), "gemm_nt");
    return gemm_nn(a, transpose(b));
}

}  // namespace serial

}  // namespace prunebound::kernels
