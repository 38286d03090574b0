#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace decern {

using Vector = std::vector<double>;

/**
 * Row-major dense matrix of doubles.
 *
 * Rows are exposed as spans so kernels can take a row without copying.
 */
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return values_.empty(); }

    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    // New matrix holding the given rows, in the given order.
    Matrix select_rows(std::span<const std::size_t> indices) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Max-subtracted softmax. Throws "empty vector" on empty input.
Vector softmax(std::span<const double> logits);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> xs);

// -sum p log p with natural log; zero entries contribute 0.
// Throws "invalid probability" for negative entries or a sum off by more than 1e-6.
double entropy(std::span<const double> p);

// Floor applied to q before taking log in cross_entropy.
inline constexpr double kLogClamp = 1e-12;

// -sum p log max(q, 1e-12).
double cross_entropy(std::span<const double> p, std::span<const double> q);

// Clamped to [-1, 1]. Throws "zero vector" if either input has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population form (1/N)
};

MeanStd mean_std(std::span<const double> xs);

// Fisher-Pearson moment coefficient m3 / m2^{3/2}; 0 when the population
// std is 0. Requires at least two values.
double skewness(std::span<const double> xs);

// (i, j) = 1 - cos(A_i, B_j).
Matrix pairwise_cosine_distance(const Matrix& a, const Matrix& b);

}  // namespace decern
