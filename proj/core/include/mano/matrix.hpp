#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mano {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// N x K raw classifier outputs. All entries finite, N >= 1, K >= 2.
class LogitsMatrix {
 public:
  explicit LogitsMatrix(Matrix values);

  std::size_t n_rows() const noexcept { return values_.rows(); }
  std::size_t n_cols() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

/// N x K row-stochastic matrix: entries in [0, 1], rows sum to one.
class ProbMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  explicit ProbMatrix(Matrix values);

  std::size_t n_rows() const noexcept { return values_.rows(); }
  std::size_t n_cols() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

/// Throws Errc::invalid_input unless `p` lies in the probability simplex
/// (entries in [0, 1], sum within `tolerance` of one).
void require_simplex(std::span<const double> p, const char* what, double tolerance = 1e-9);

}  // namespace mano
