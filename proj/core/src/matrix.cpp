#include "mano/matrix.hpp"

#include <cmath>
#include <string>

#include "mano/error.hpp"

namespace mano {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw Error(Errc::invalid_input, "matrix buffer size " + std::to_string(values_.size()) +
                                         " does not match shape " + std::to_string(rows) + "x" +
                                         std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(Errc::invalid_input, "ragged matrix initializer");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

LogitsMatrix::LogitsMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1) throw Error(Errc::invalid_input, "logits matrix needs at least one row");
  if (values_.cols() < 2) throw Error(Errc::invalid_input, "logits matrix needs at least two classes");
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    for (std::size_t k = 0; k < values_.cols(); ++k) {
      if (!std::isfinite(values_(i, k))) {
        throw Error(Errc::invalid_input, "non-finite logit at row " + std::to_string(i) + ", column " +
                                             std::to_string(k));
      }
    }
  }
}

ProbMatrix::ProbMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 2) {
    throw Error(Errc::invalid_input, "probability matrix needs N >= 1 rows and K >= 2 columns");
  }
  for (std::size_t i = 0; i < values_.rows(); ++i) require_simplex(values_.row(i), "probability row", kRowSumTolerance);
}

void require_simplex(std::span<const double> p, const char* what, double tolerance) {
  if (p.empty()) throw Error(Errc::invalid_input, std::string(what) + " is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(Errc::invalid_input, std::string(what) + " has an entry outside [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw Error(Errc::invalid_input, std::string(what) + " does not sum to one");
  }
}

}  // namespace mano
