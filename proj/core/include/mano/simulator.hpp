#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mano/estimators.hpp"
#include "mano/evaluation.hpp"
#include "mano/matrix.hpp"

namespace mano::sim {

/// Gaussian-mixture classification task.
///
/// Unless `class_means` is given, means are the vertices of a regular simplex
/// of radius `radius` centred at the origin in the first K coordinates:
/// mean_k = radius * sqrt(K / (K - 1)) * (e_k - 1/K). When K > d the means
/// are instead spaced evenly on a circle of that radius in the first two
/// coordinates.
struct TaskSpec {
  std::size_t n_classes = 10;
  std::size_t input_dim = 16;
  double radius = 3.0;
  std::optional<Matrix> class_means;
  double class_cov_scale = 1.0;
  std::size_t n_train = 100;  // per class
  std::size_t n_test = 200;   // per class
  std::uint64_t seed = 7;

  void validate() const;
  Matrix means() const;
};

struct Dataset {
  Matrix x;
  std::vector<std::int64_t> y;
};

struct Task {
  Matrix means;
  double sigma = 1.0;
  Dataset train;
  Dataset test;
};

/// Draws x ~ N(mean_y, sigma^2 I), labels cycling 0..K-1 so classes are
/// balanced. Train uses stream derive_seed(seed, 1), test derive_seed(seed, 2);
/// coordinates are drawn in row-major order with Rng::normal().
Task generate_task(const TaskSpec& spec);

/// Synthetic shift of a clean test set.
struct ShiftSpec {
  int severity = 0;  // 0..5
  double mean_drift = 0.4;
  double noise_gain = 1.3;
  std::uint64_t drift_direction_seed = 1;
  double label_marginal_tilt = 0.0;

  void validate() const;
};

/// Unit drift direction for `direction_seed`: d normals from stream
/// derive_seed(direction_seed, 0xD1F7), normalized.
std::vector<double> drift_direction(std::uint64_t direction_seed, std::size_t dim);

/// x' = mean_y + s * mean_drift * u + noise_gain^s * (x - mean_y) with u the
/// shared drift direction. With tilt > 0, samples of class k are kept with
/// probability (1 - tilt)^(k s / 5) using stream
/// derive_seed(direction_seed, 0x717 + s). Severity 0 returns `clean`.
Dataset apply_shift(const Dataset& clean, const Matrix& class_means, const ShiftSpec& shift);

struct TrainingMeta {
  double lr = 0.0;          // learning rate after any halvings
  std::size_t epochs = 0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
};

class LinearClassifier {
 public:
  LinearClassifier(Matrix weights, std::vector<double> bias, TrainingMeta meta = {});

  const Matrix& weights() const noexcept { return weights_; }  // K x d
  std::span<const double> bias() const noexcept { return bias_; }
  const TrainingMeta& meta() const noexcept { return meta_; }
  std::size_t n_classes() const noexcept { return weights_.rows(); }

  /// N x K logits W x + b.
  Matrix logits(const Matrix& x) const;

 private:
  Matrix weights_;
  std::vector<double> bias_;
  TrainingMeta meta_;
};

struct LossGradient {
  double loss = 0.0;
  Matrix grad_weights;
  std::vector<double> grad_bias;
};

/// Mean softmax cross-entropy and its analytic gradient.
LossGradient softmax_cross_entropy(const Matrix& weights, std::span<const double> bias, const Dataset& data);

struct TrainerOptions {
  double lr = 0.1;
  std::size_t epochs = 500;
  int max_halvings = 10;
  double monotone_tolerance = 1e-9;
};

/// Full-batch gradient descent from zero. A step that raises the loss by more
/// than the tolerance is retried at half the learning rate; exceeding
/// `max_halvings` throws Errc::diverged.
LinearClassifier train_logistic(const Dataset& train, std::size_t n_classes, const TrainerOptions& options = {},
                                std::uint64_t seed = 0);

struct ScoredSet {
  std::string id;
  Matrix logits;
  std::vector<std::int64_t> labels;
};

struct BenchmarkRun {
  LinearClassifier model;
  double clean_accuracy = 0.0;
  ScoredSet validation;          // clean test set, used for ATC and COT
  std::vector<ScoredSet> sets;   // one per shift, input order
  std::vector<ScoreReport> reports;
  std::vector<EvalRecord> records;
};

/// Stable identifier for the i-th shift: "shiftNN-dSEED-sSEV".
std::string shift_id(std::size_t index, const ShiftSpec& shift);

/// Grid of shifts: direction seeds 1..n_directions times the given
/// severities, direction-major.
std::vector<ShiftSpec> shift_grid(std::size_t n_directions, std::span<const int> severities,
                                  const ShiftSpec& base = {});

/// Trains once, then scores every shifted test set. ATC is fitted on the
/// clean test set and COT uses its label marginal.
BenchmarkRun run_benchmark(const TaskSpec& task, std::span<const ShiftSpec> shifts,
                           std::span<const Estimator> estimators, const ScoringContext& base = {},
                           const TrainerOptions& trainer = {});

/// Writes logits/<id>.npy (f64), labels/<id>.npy (i64) and manifest.json
/// with the clean set as the validation entry.
void export_benchmark(const BenchmarkRun& run, const std::filesystem::path& dir);

}  // namespace mano::sim
