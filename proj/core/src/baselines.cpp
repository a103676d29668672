#include "mano/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mano/error.hpp"

namespace mano {

namespace {

Matrix softmax_rows(const LogitsMatrix& logits) {
  Matrix out(logits.n_rows(), logits.n_cols());
  for (std::size_t i = 0; i < logits.n_rows(); ++i) {
    const auto s = softmax(logits.row(i));
    std::copy(s.begin(), s.end(), out.row(i).begin());
  }
  return out;
}

double max_softmax(std::span<const double> q) {
  const auto s = softmax(q);
  return *std::max_element(s.begin(), s.end());
}

}  // namespace

std::vector<double> SourceInfo::empirical_marginal(const std::vector<std::int64_t>& labels, std::size_t num_classes) {
  if (labels.empty()) throw Error(Errc::missing_data, "empirical marginal of an empty label vector");
  std::vector<double> counts(num_classes, 0.0);
  for (const auto y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw Error(Errc::invalid_input, "label " + std::to_string(y) + " outside [0, " + std::to_string(num_classes) + ")");
    }
    counts[static_cast<std::size_t>(y)] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(labels.size());
  return counts;
}

double conf_score(const LogitsMatrix& logits) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < logits.n_rows(); ++i) acc.add(max_softmax(logits.row(i)));
  return acc.value() / static_cast<double>(logits.n_rows());
}

double entropy_score(const LogitsMatrix& logits) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < logits.n_rows(); ++i) acc.add(shannon_entropy(softmax(logits.row(i))));
  return -acc.value() / static_cast<double>(logits.n_rows());
}

double atc_fit(const SourceInfo& source) {
  if (!source.val_logits || !source.val_labels) {
    throw Error(Errc::missing_data, "ATC needs validation logits and labels");
  }
  const LogitsMatrix& logits = *source.val_logits;
  const auto& labels = *source.val_labels;
  if (labels.size() != logits.n_rows()) {
    throw Error(Errc::invalid_input, "ATC validation labels and logits differ in length");
  }

  const std::size_t n = logits.n_rows();
  std::vector<double> conf(n);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= logits.n_cols()) {
      throw Error(Errc::invalid_input, "ATC validation label out of range");
    }
    conf[i] = max_softmax(logits.row(i));
    if (argmax(logits.row(i)) != static_cast<std::size_t>(y)) ++wrong;
  }
  std::sort(conf.begin(), conf.end());

  if (wrong == 0) return conf.front();
  if (wrong == n) return std::nextafter(conf.back(), std::numeric_limits<double>::infinity());
  return conf[wrong - 1] + (conf[wrong] - conf[wrong - 1]) / 2.0;
}

double atc_score(const LogitsMatrix& logits, double threshold) {
  if (!std::isfinite(threshold)) throw Error(Errc::invalid_input, "ATC threshold must be finite");
  std::size_t above = 0;
  for (std::size_t i = 0; i < logits.n_rows(); ++i) {
    if (max_softmax(logits.row(i)) >= threshold) ++above;
  }
  return static_cast<double>(above) / static_cast<double>(logits.n_rows());
}

double nuclear_score(const LogitsMatrix& logits) {
  const double nk = static_cast<double>(logits.n_rows() * logits.n_cols());
  return nuclear_norm(softmax_rows(logits)) / std::sqrt(nk);
}

double mde_score(const LogitsMatrix& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(Errc::invalid_input, "MDE temperature must be positive");
  }
  std::vector<double> scaled(logits.n_cols());
  CompensatedSum acc;
  for (std::size_t i = 0; i < logits.n_rows(); ++i) {
    const auto row = logits.row(i);
    std::transform(row.begin(), row.end(), scaled.begin(), [&](double x) { return x / temperature; });
    acc.add(temperature * logsumexp(scaled));
  }
  return acc.value() / static_cast<double>(logits.n_rows());
}

CotResult cot_score(const LogitsMatrix& logits, const SourceInfo& source, const SinkhornOptions& options) {
  const std::size_t n = logits.n_rows();
  const std::size_t k = logits.n_cols();

  CotResult result;
  std::vector<double> target;
  if (source.label_marginal) {
    target = *source.label_marginal;
    if (target.size() != k) throw Error(Errc::invalid_input, "COT label marginal has the wrong length");
    require_simplex(target, "COT label marginal");
  } else {
    target.assign(k, 1.0 / static_cast<double>(k));
    result.default_marginal = true;
  }

  Matrix cost(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = softmax(logits.row(i));
    for (std::size_t j = 0; j < k; ++j) cost(i, j) = std::max(0.0, 1.0 - s[j]);
  }
  const std::vector<double> empirical(n, 1.0 / static_cast<double>(n));
  const SinkhornResult ot = sinkhorn_ot(cost, empirical, target, options);
  result.score = std::clamp(ot.cost, 0.0, 1.0);
  result.converged = ot.converged;
  return result;
}

}  // namespace mano
