#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mano/matrix.hpp"

namespace mano {

/// Fraction of rows whose argmax (lowest index on ties) equals the label.
double accuracy(const LogitsMatrix& logits, std::span<const std::int64_t> labels);

/// Coefficient of determination of the univariate OLS fit of y on x, clamped
/// to [0, 1]. Throws Errc::degenerate_fit for constant x or y.
double r_squared(std::span<const double> x, std::span<const double> y);

/// Average ranks (ties share the mean rank), 1-based.
std::vector<double> average_ranks(std::span<const double> v);

/// Pearson correlation of average ranks.
double spearman_rho(std::span<const double> x, std::span<const double> y);

double mae(std::span<const double> predicted, std::span<const double> actual);

struct EvalRecord {
  std::string dataset_id;
  std::map<std::string, double> scores;
  std::optional<double> true_accuracy;
  std::size_t n_samples = 0;
};

struct RegressionModel {
  double slope = 0.0;
  double intercept = 0.0;
  double fit_r2 = 0.0;
  std::string estimator_name;
};

/// OLS accuracy ~ score over the labeled records.
RegressionModel fit_regression(std::span<const EvalRecord> records, std::string_view estimator);

/// clamp(slope * score + intercept, 0, 1).
double predict_accuracy(const RegressionModel& model, double score);

struct EstimatorMetrics {
  std::string estimator;
  // Empty when the metric is undefined on this data (e.g. constant scores).
  std::optional<double> r2;
  std::optional<double> rho;
  std::optional<double> abs_rho;
  std::optional<double> mae_cv;
};

/// Per-estimator R^2, Spearman rho, |rho| and cross-validated MAE.
///
/// The MAE protocol sorts labeled records by dataset_id and forms
/// F = min(10, n) folds, fold f holding the records at sorted positions
/// i with i % F == f. Each fold is predicted by a regression fitted on the
/// others; mae_cv is the mean of the per-fold MAEs.
///
/// Estimators are the score keys shared by every labeled record.
std::vector<EstimatorMetrics> benchmark_report(std::span<const EvalRecord> records);

}  // namespace mano
