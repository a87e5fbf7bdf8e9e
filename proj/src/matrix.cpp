#include "prunebound/matrix.hpp"

#include "prunebound/errors.hpp"
#include "prunebound/kernels.hpp"
#include "prunebound/rng.hpp"

#include <cmath>
#include <string>

namespace prunebound {

namespace {

void require_finite(std::span<const double> v, const char* where) {
    if (!all_finite(v)) {
        throw ValidationError(std::string(where) + ": matrix contains non-finite entries");
    }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(where) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: data length " + std::to_string(data_.size()) + " != " +
                             std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    require_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::filled(std::size_t rows, std::size_t cols, double value) {
    return Matrix(rows, cols, std::vector<double>(rows * cols, value));
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.rows()) + " differ");
    }
    return kernels::gemm_nn(a, b);
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionError("multiply: vector length does not match columns");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        const auto r = a.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> x) {
    if (a.rows() != x.size()) throw DimensionError("multiply_transposed: vector length does not match rows");
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * x[i];
    }
    return y;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix c = a;
    auto cd = c.data();
    const auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k) cd[k] += bd[k];
    return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix c = a;
    auto cd = c.data();
    const auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k) cd[k] -= bd[k];
    return c;
}

Matrix scale(const Matrix& a, double s) {
    Matrix c = a;
    for (auto& v : c.data()) v *= s;
    require_finite(c.data(), "scale");
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix c = a;
    auto cd = c.data();
    const auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k) cd[k] *= bd[k];
    return c;
}

double frobenius_norm(const Matrix& m) {
    return euclidean_norm(m.data());
}

double max_abs(const Matrix& m) {
    double best = 0.0;
    for (double v : m.data()) best = std::max(best, std::abs(v));
    return best;
}

double l1_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += std::abs(v);
    return s;
}

double norm_2_1(const Matrix& m) {
    std::vector<double> col_sq(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) col_sq[j] += r[j] * r[j];
    }
    double s = 0.0;
    for (double c : col_sq) s += std::sqrt(c);
    return s;
}

double euclidean_norm(std::span<const double> v) {
    // Scaled accumulation avoids overflow for very large entries.
    double scale_v = 0.0;
    for (double x : v) scale_v = std::max(scale_v, std::abs(x));
    if (scale_v == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) {
        const double r = x / scale_v;
        s += r * r;
    }
    return scale_v * std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double variance, const RngHandle& rng) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw ValidationError("gaussian_matrix: variance must be positive and finite");
    }
    const double sd = std::sqrt(variance);
    std::vector<double> data(rows * cols);
    const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        data[static_cast<std::size_t>(k)] = sd * normal_at(rng, static_cast<std::uint64_t>(k));
    }
    return Matrix(rows, cols, std::move(data));
}

}  // namespace prunebound
