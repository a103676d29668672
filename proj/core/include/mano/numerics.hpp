#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mano/matrix.hpp"

namespace mano {

/// Neumaier-compensated running sum. Order-dependent only at the level of the
/// compensation term, so serial accumulation over a fixed order is
/// reproducible bit for bit.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> v);

/// max(q) + ln sum exp(q - max(q)).
double logsumexp(std::span<const double> q);

/// Max-subtracted softmax; never overflows for finite input.
std::vector<double> softmax(std::span<const double> q);

/// Link function u / ||u||_1 on the nonnegative orthant, with the zero vector
/// mapped to the uniform distribution.
std::vector<double> phi(std::span<const double> u);

/// (sum_ik |M_ik|^p)^(1/p). Requires p > 1.
double entrywise_lp_norm(const Matrix& m, double p);

struct EigenOptions {
  double off_diagonal_tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, sorted in
/// descending order. Sweeps stop once the off-diagonal Frobenius norm drops
/// below tolerance * ||A||_F.
std::vector<double> symmetric_eigenvalues(Matrix a, const EigenOptions& options = {});

/// Sum of singular values, taken as square roots of the eigenvalues of the
/// Gram matrix on the shorter side (M^T M, or M M^T when N < K).
double nuclear_norm(const Matrix& m);

/// Tsallis alpha-entropy with prefactor 1/alpha:
/// (1/alpha) (alpha - 1)^-1 (1 - ||p||_alpha^alpha).
double tsallis_entropy(std::span<const double> p, double alpha);

/// KL(p || s) with 0 ln 0 = 0. Throws Errc::divergence_undefined when s
/// vanishes somewhere p does not.
double kl_divergence(std::span<const double> p, std::span<const double> s);

enum class EntropyForm {
  standard,        // -sum p ln p
  class_averaged,  // -(1/K) sum p ln p
};

double shannon_entropy(std::span<const double> p, EntropyForm form = EntropyForm::standard);

struct SinkhornOptions {
  double epsilon = 0.01;
  std::size_t max_iter = 10000;
  double tol = 1e-8;
};

struct SinkhornResult {
  double cost = 0.0;            // <P, C>
  double marginal_error = 0.0;  // L1 violation of the row marginal
  std::size_t iterations = 0;
  bool converged = false;
};

/// Entropic optimal transport between `mu` (rows) and `nu` (columns) with
/// log-domain Sinkhorn updates. Zero-mass atoms are dropped. Non-convergence
/// is reported in the result, not thrown.
SinkhornResult sinkhorn_ot(const Matrix& cost, std::span<const double> mu, std::span<const double> nu,
                           const SinkhornOptions& options = {});

}  // namespace mano
