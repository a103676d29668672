#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mano/matrix.hpp"

namespace mano {

/// Normalization selected by softrun for a whole dataset.
enum class Branch { taylor, softmax };

std::string_view to_string(Branch branch) noexcept;

struct SoftrunConfig {
  /// Threshold on the criterion. Taylor is used when criterion <= eta.
  /// +/-infinity force one branch; NaN is rejected.
  double eta = 5.0;
  /// Order of the truncated exponential on the Taylor branch.
  int taylor_order = 2;
  /// Exponent of the entrywise norm used for aggregation.
  double p = 4.0;

  void validate() const;
};

struct SoftrunOutput {
  ProbMatrix probs;
  double phi_value;
  Branch branch;
};

struct ManoResult {
  double score = 0.0;
  double phi_value = 0.0;
  Branch branch = Branch::taylor;
  double mean_tsallis = 0.0;

  bool operator==(const ManoResult&) const = default;
};

/// Truncated exponential sum_{j<=order} q^j / j! followed by phi. For
/// order >= 3 the row minimum is subtracted first so entries stay
/// nonnegative; order 2 is strictly positive already.
std::vector<double> taylor_normalize(std::span<const double> q, int order);

/// Mean negative log-softmax over all N*K entries:
/// (1/N) sum_i [logsumexp(q_i) - mean_k q_ik]. Bounded below by ln K.
double criterion_phi(const LogitsMatrix& logits);

/// Dataset-level normalization: one criterion value, one branch, all rows.
SoftrunOutput softrun(const LogitsMatrix& logits, const SoftrunConfig& cfg = {});

/// ((1/NK) sum_ik Q_ik^p)^(1/p).
double aggregate_score(const ProbMatrix& probs, double p);

/// Mean over rows of the Tsallis alpha-entropy.
double mean_tsallis_entropy(const ProbMatrix& probs, double alpha);

ManoResult mano_score(const LogitsMatrix& logits, const SoftrunConfig& cfg = {});

/// |w.z + b| / ||w||_2.
double distance_to_hyperplane(std::span<const double> w, double b, std::span<const double> z);

struct PhiStudyOptions {
  std::vector<std::size_t> class_counts;
  std::size_t n_models = 100000;
  /// Rows per simulated logits matrix.
  std::size_t n_samples = 1;
  double logit_bound = 5.0;
  std::uint64_t seed = 0;
};

struct PhiInterval {
  std::size_t num_classes = 0;
  double low = 0.0;   // 0.5th percentile
  double high = 0.0;  // 99.5th percentile
};

/// Monte-Carlo 99% interval of the criterion for logits drawn uniformly in
/// [-bound, bound]. Each class count uses its own stream derived from
/// (seed, K). Percentiles interpolate linearly between order statistics.
std::vector<PhiInterval> phi_confidence_study(const PhiStudyOptions& options);

}  // namespace mano
