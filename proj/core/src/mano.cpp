#include "mano/mano.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mano/error.hpp"
#include "mano/numerics.hpp"
#include "mano/random.hpp"

namespace mano {

std::string_view to_string(Branch branch) noexcept {
  return branch == Branch::taylor ? "taylor" : "softmax";
}

void SoftrunConfig::validate() const {
  if (std::isnan(eta)) throw Error(Errc::invalid_input, "eta must not be NaN");
  if (taylor_order < 1) throw Error(Errc::invalid_input, "taylor order must be >= 1");
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(Errc::invalid_input, "p must be finite and > 1");
}

std::vector<double> taylor_normalize(std::span<const double> q, int order) {
  if (order < 1) throw Error(Errc::invalid_input, "taylor order must be >= 1");
  std::vector<double> v(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (!std::isfinite(q[k])) throw Error(Errc::invalid_input, "taylor input contains a non-finite value");
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j <= order; ++j) {
      term *= q[k] / j;
      sum += term;
    }
    v[k] = sum;
  }
  if (order >= 3 && !v.empty()) {
    const double lo = *std::min_element(v.begin(), v.end());
    for (double& x : v) x -= lo;
  }
  return phi(v);
}

double criterion_phi(const LogitsMatrix& logits) {
  const std::size_t k = logits.n_cols();
  CompensatedSum total;
  for (std::size_t i = 0; i < logits.n_rows(); ++i) {
    const auto row = logits.row(i);
    CompensatedSum row_sum;
    for (double x : row) row_sum.add(x);
    total.add(logsumexp(row) - row_sum.value() / static_cast<double>(k));
  }
  return total.value() / static_cast<double>(logits.n_rows());
}

SoftrunOutput softrun(const LogitsMatrix& logits, const SoftrunConfig& cfg) {
  cfg.validate();
  const double phi_value = criterion_phi(logits);
  const Branch branch = phi_value <= cfg.eta ? Branch::taylor : Branch::softmax;

  Matrix q(logits.n_rows(), logits.n_cols());
  for (std::size_t i = 0; i < logits.n_rows(); ++i) {
    const auto normalized =
        branch == Branch::taylor ? taylor_normalize(logits.row(i), cfg.taylor_order) : softmax(logits.row(i));
    std::copy(normalized.begin(), normalized.end(), q.row(i).begin());
  }
  return {ProbMatrix(std::move(q)), phi_value, branch};
}

double aggregate_score(const ProbMatrix& probs, double p) {
  const double nk = static_cast<double>(probs.n_rows() * probs.n_cols());
  CompensatedSum acc;
  for (double x : probs.values().values()) acc.add(std::pow(x, p));
  return std::pow(acc.value() / nk, 1.0 / p);
}

double mean_tsallis_entropy(const ProbMatrix& probs, double alpha) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < probs.n_rows(); ++i) acc.add(tsallis_entropy(probs.row(i), alpha));
  return acc.value() / static_cast<double>(probs.n_rows());
}

ManoResult mano_score(const LogitsMatrix& logits, const SoftrunConfig& cfg) {
  const SoftrunOutput normalized = softrun(logits, cfg);
  ManoResult result;
  result.score = aggregate_score(normalized.probs, cfg.p);
  result.phi_value = normalized.phi_value;
  result.branch = normalized.branch;
  result.mean_tsallis = mean_tsallis_entropy(normalized.probs, cfg.p);
  return result;
}

double distance_to_hyperplane(std::span<const double> w, double b, std::span<const double> z) {
  if (w.size() != z.size()) throw Error(Errc::invalid_input, "hyperplane and point dimensions differ");
  double dot = b;
  double norm2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    dot += w[k] * z[k];
    norm2 += w[k] * w[k];
  }
  if (norm2 == 0.0) throw Error(Errc::invalid_input, "hyperplane normal must be nonzero");
  return std::abs(dot) / std::sqrt(norm2);
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<PhiInterval> phi_confidence_study(const PhiStudyOptions& options) {
  if (options.n_models < 100) throw Error(Errc::invalid_input, "phi study needs at least 100 models");
  if (options.n_samples < 1) throw Error(Errc::invalid_input, "phi study needs at least one sample per model");
  if (!(options.logit_bound >= 0.0) || !std::isfinite(options.logit_bound)) {
    throw Error(Errc::invalid_input, "logit bound must be finite and nonnegative");
  }

  std::vector<PhiInterval> out;
  out.reserve(options.class_counts.size());
  std::vector<double> values(options.n_models);
  for (const std::size_t k : options.class_counts) {
    if (k < 2) throw Error(Errc::invalid_input, "phi study needs K >= 2");
    Rng rng(derive_seed(options.seed, k));
    Matrix logits(options.n_samples, k);
    for (double& v : values) {
      for (double& x : logits.values()) x = rng.uniform(-options.logit_bound, options.logit_bound);
      v = criterion_phi(LogitsMatrix(logits));
    }
    std::sort(values.begin(), values.end());
    out.push_back({k, percentile(values, 0.005), percentile(values, 0.995)});
  }
  return out;
}

}  // namespace mano
