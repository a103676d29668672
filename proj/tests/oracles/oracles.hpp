#pragma once

// Reference implementations used only by tests. Each one takes a different
// route from the library code it checks.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mano/matrix.hpp"

namespace oracle {

/// Singular values by one-sided Jacobi (Hestenes) rotations applied to the
/// columns of `a` until they are mutually orthogonal. Descending order.
std::vector<double> jacobi_singular_values(mano::Matrix a);

/// Exact optimal transport cost min <P, C> over the transport polytope,
/// via successive shortest augmenting paths (Bellman-Ford) on the bipartite
/// flow network.
double exact_transport_cost(const mano::Matrix& cost, std::span<const double> mu, std::span<const double> nu);

/// Standard normal CDF.
double gaussian_cdf(double x);

/// 1 + #{x_j < x_i} + (#{x_j == x_i} - 1) / 2, by direct counting.
std::vector<double> brute_force_ranks(std::span<const double> x);

double pearson(std::span<const double> x, std::span<const double> y);

struct Line {
  double slope;
  double intercept;
};

/// Least squares line from the 2x2 normal equations.
Line normal_equation_fit(std::span<const double> x, std::span<const double> y);

/// Central differences of f around `at` with step h.
std::vector<double> central_differences(const std::function<double(std::span<const double>)>& f,
                                        std::vector<double> at, double h);

/// Hand-written NPY v1.0 image: header dict laid out byte by byte.
std::vector<std::uint8_t> handmade_npy(const std::string& descr, bool fortran_order, const std::string& shape_tuple,
                                       std::span<const std::uint8_t> payload);

/// Naive softmax without max subtraction, for moderate inputs.
std::vector<double> naive_softmax(std::span<const double> q);

/// Random N x K matrix with entries uniform in [lo, hi].
mano::Matrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double lo, double hi);

/// Fresh scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace oracle
