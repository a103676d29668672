#include <algorithm>
#include <cmath>
#include <limits>

#include "mano/error.hpp"
#include "mano/numerics.hpp"

namespace mano {

namespace {

std::vector<std::size_t> support(std::span<const double> w) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) idx.push_back(i);
  return idx;
}

}  // namespace

SinkhornResult sinkhorn_ot(const Matrix& cost, std::span<const double> mu, std::span<const double> nu,
                           const SinkhornOptions& options) {
  if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
    throw Error(Errc::invalid_input, "sinkhorn: cost shape does not match the marginals");
  }
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    throw Error(Errc::invalid_input, "sinkhorn: epsilon must be positive");
  }
  require_simplex(mu, "sinkhorn source marginal");
  require_simplex(nu, "sinkhorn target marginal");
  for (double c : cost.values()) {
    if (!std::isfinite(c) || c < 0.0) throw Error(Errc::invalid_input, "sinkhorn: cost must be finite and nonnegative");
  }

  const auto rows = support(mu);
  const auto cols = support(nu);
  const std::size_t n = rows.size();
  const std::size_t m = cols.size();
  const double eps = options.epsilon;

  // Cost restricted to the support, pre-divided by epsilon.
  Matrix c(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c(i, j) = cost(rows[i], cols[j]) / eps;

  std::vector<double> log_mu(n), log_nu(m);
  for (std::size_t i = 0; i < n; ++i) log_mu[i] = std::log(mu[rows[i]]);
  for (std::size_t j = 0; j < m; ++j) log_nu[j] = std::log(nu[cols[j]]);

  // Scaled potentials f / eps and g / eps.
  std::vector<double> f(n, 0.0), g(m, 0.0);
  std::vector<double> row_lse(n), scratch(std::max(n, m));

  auto compute_row_lse = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        scratch[j] = g[j] - c(i, j);
        mx = std::max(mx, scratch[j]);
      }
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += std::exp(scratch[j] - mx);
      row_lse[i] = mx + std::log(s);
    }
  };
  auto row_violation = [&] {
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err += std::abs(std::exp(f[i] + row_lse[i]) - mu[rows[i]]);
    return err;
  };

  SinkhornResult result;
  std::size_t it = 0;
  for (; it < options.max_iter; ++it) {
    compute_row_lse();
    if (it > 0) {
      result.marginal_error = row_violation();
      if (result.marginal_error < options.tol) {
        result.converged = true;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) f[i] = log_mu[i] - row_lse[i];

    for (std::size_t j = 0; j < m; ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = f[i] - c(i, j);
        mx = std::max(mx, scratch[i]);
      }
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::exp(scratch[i] - mx);
      g[j] = log_nu[j] - (mx + std::log(s));
    }
  }
  if (!result.converged) {
    compute_row_lse();
    result.marginal_error = row_violation();
    result.converged = result.marginal_error < options.tol;
  }
  result.iterations = it;

  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) total.add(std::exp(f[i] + g[j] - c(i, j)) * cost(rows[i], cols[j]));
  result.cost = total.value();
  return result;
}

}  // namespace mano
