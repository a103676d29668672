#include "mano/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mano/error.hpp"

namespace mano {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(Errc::invalid_input, std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

std::size_t argmax(std::span<const double> v) {
  if (v.empty()) throw Error(Errc::invalid_input, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = k;
  }
  return best;
}

double logsumexp(std::span<const double> q) {
  if (q.empty()) throw Error(Errc::invalid_input, "logsumexp of an empty vector");
  require_finite(q, "logsumexp input");
  const double m = *std::max_element(q.begin(), q.end());
  double acc = 0.0;
  for (double x : q) acc += std::exp(x - m);
  return m + std::log(acc);
}

std::vector<double> softmax(std::span<const double> q) {
  if (q.empty()) throw Error(Errc::invalid_input, "softmax of an empty vector");
  require_finite(q, "softmax input");
  const double m = *std::max_element(q.begin(), q.end());
  std::vector<double> out(q.size());
  double total = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    out[k] = std::exp(q[k] - m);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> phi(std::span<const double> u) {
  if (u.empty()) throw Error(Errc::invalid_input, "phi of an empty vector");
  double total = 0.0;
  for (double x : u) {
    if (!std::isfinite(x)) throw Error(Errc::invalid_input, "phi input contains a non-finite value");
    if (x < 0.0) throw Error(Errc::invalid_input, "phi input must be nonnegative");
    total += x;
  }
  std::vector<double> out(u.size());
  if (total == 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(u.size()));
    return out;
  }
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k] / total;
  return out;
}

double entrywise_lp_norm(const Matrix& m, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(Errc::invalid_input, "Lp norm requires finite p > 1");
  require_finite(m.values(), "Lp norm input");
  CompensatedSum acc;
  for (double x : m.values()) acc.add(std::pow(std::abs(x), p));
  return std::pow(acc.value(), 1.0 / p);
}

double nuclear_norm(const Matrix& m) {
  require_finite(m.values(), "nuclear norm input");
  // Gram matrix on the shorter side, so a wide input has no spurious zero
  // eigenvalues whose square roots amplify rounding.
  const bool by_rows = m.rows() < m.cols();
  const std::size_t dim = by_rows ? m.rows() : m.cols();
  const std::size_t len = by_rows ? m.cols() : m.rows();
  auto at = [&](std::size_t a, std::size_t i) { return by_rows ? m(a, i) : m(i, a); };
  Matrix gram(dim, dim);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i) s += at(a, i) * at(b, i);
      gram(a, b) = s;
      gram(b, a) = s;
    }
  }
  double total = 0.0;
  for (double lambda : symmetric_eigenvalues(std::move(gram))) total += std::sqrt(std::max(lambda, 0.0));
  return total;
}

double tsallis_entropy(std::span<const double> p, double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw Error(Errc::invalid_input, "Tsallis entropy requires alpha > 1");
  require_simplex(p, "Tsallis entropy input");
  double power_sum = 0.0;
  for (double v : p) power_sum += std::pow(v, alpha);
  return (1.0 / alpha) * (1.0 - power_sum) / (alpha - 1.0);
}

double kl_divergence(std::span<const double> p, std::span<const double> s) {
  if (p.size() != s.size()) throw Error(Errc::invalid_input, "KL divergence needs equal-length vectors");
  require_simplex(p, "KL first argument");
  require_simplex(s, "KL second argument");
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (s[k] == 0.0) {
      throw Error(Errc::divergence_undefined, "KL divergence undefined: second argument vanishes at index " +
                                                  std::to_string(k));
    }
    total += p[k] * std::log(p[k] / s[k]);
  }
  // Rounding can leave a tiny negative residue when p == s.
  return std::max(total, 0.0);
}

double shannon_entropy(std::span<const double> p, EntropyForm form) {
  require_simplex(p, "entropy input");
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  h = std::max(h, 0.0);
  if (form == EntropyForm::class_averaged) h /= static_cast<double>(p.size());
  return h;
}

}  // namespace mano
