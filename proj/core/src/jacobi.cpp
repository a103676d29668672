#include <algorithm>
#include <cmath>
#include <functional>

#include "mano/error.hpp"
#include "mano/numerics.hpp"

namespace mano {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.values()) s += x * x;
  return std::sqrt(s);
}

// Zeroes a(p, q) with a two-sided Givens rotation.
void rotate(Matrix& a, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(Matrix a, const EigenOptions& options) {
  if (a.rows() != a.cols()) throw Error(Errc::invalid_input, "eigenvalues need a square matrix");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!std::isfinite(a(i, j)) || a(i, j) != a(j, i)) {
        throw Error(Errc::invalid_input, "eigenvalues need a finite symmetric matrix");
      }
    }
  }

  const double scale = frobenius_norm(a);
  if (scale > 0.0) {
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      if (off_diagonal_norm(a) <= options.off_diagonal_tolerance * scale) break;
      for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) rotate(a, p, q);
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

}  // namespace mano
