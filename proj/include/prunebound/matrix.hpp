#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace prunebound {

struct RngHandle;

// Dense row-major matrix of doubles. Shape is fixed at construction and every
// factory rejects non-finite entries.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix filled(std::size_t rows, std::size_t cols, double value);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& m);
Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> x);  // a^T x
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
double l1_norm(const Matrix& m);  // entrywise
// Sum over columns of the column Euclidean norms, applied to `m` as given.
double norm_2_1(const Matrix& m);

double euclidean_norm(std::span<const double> v);
bool all_finite(std::span<const double> v);

// I.i.d. N(0, variance) entries; entry k (row-major) is normal_at(rng, k).
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double variance, const RngHandle& rng);

}  // namespace prunebound
