#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mano/matrix.hpp"
#include "mano/numerics.hpp"

namespace mano {

/// Source-side information some baselines need. All fields optional; an
/// estimator that needs a missing field throws Errc::missing_data.
struct SourceInfo {
  std::optional<LogitsMatrix> val_logits;
  std::optional<std::vector<std::int64_t>> val_labels;
  std::optional<std::vector<double>> label_marginal;

  /// Empirical label frequencies of `labels` over `num_classes` classes.
  static std::vector<double> empirical_marginal(const std::vector<std::int64_t>& labels, std::size_t num_classes);
};

/// Mean max-softmax confidence, in [1/K, 1].
double conf_score(const LogitsMatrix& logits);

/// Negative mean Shannon entropy of the softmax rows, in [-ln K, 0].
double entropy_score(const LogitsMatrix& logits);

/// Threshold t on max-softmax confidence such that the fraction of
/// validation points with confidence below t matches the validation error.
/// With m misclassified points out of N (sorted confidences c_0 <= ...):
/// m = 0 gives c_0, m = N gives the next double above c_{N-1}, otherwise the
/// midpoint of c_{m-1} and c_m.
double atc_fit(const SourceInfo& source);

/// Fraction of rows whose max-softmax confidence is >= threshold.
double atc_score(const LogitsMatrix& logits, double threshold);

/// ||softmax(Q)||_* / sqrt(N K), in (0, 1].
double nuclear_score(const LogitsMatrix& logits);

/// Mean of T * logsumexp(q_i / T) (negative free energy).
double mde_score(const LogitsMatrix& logits, double temperature = 1.0);

struct CotResult {
  /// Estimated error in [0, 1]; anticorrelated with accuracy.
  double score = 0.0;
  /// Set when no label marginal was supplied and uniform was assumed.
  bool default_marginal = false;
  bool converged = false;
};

/// Entropic OT cost between the softmax rows (mass 1/N each) and the simplex
/// vertices e_k (mass label_marginal_k), with total-variation ground cost
/// 1/2 ||s - e_k||_1 = 1 - s_k.
CotResult cot_score(const LogitsMatrix& logits, const SourceInfo& source, const SinkhornOptions& options = {});

}  // namespace mano
