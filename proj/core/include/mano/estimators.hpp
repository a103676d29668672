#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mano/baselines.hpp"
#include "mano/mano.hpp"

namespace mano {

enum class Estimator { mano, confscore, entropy, atc, nuclear, mde, cot };

struct EstimatorInfo {
  Estimator id;
  std::string_view name;
  /// +1 if the score rises with accuracy, -1 if it falls.
  int sign;
  std::string_view variant;
};

/// All registered estimators in canonical order.
std::span<const EstimatorInfo> registered_estimators() noexcept;
const EstimatorInfo& estimator_info(Estimator id);
/// Throws Errc::invalid_input for unknown names.
Estimator parse_estimator(std::string_view name);
std::vector<Estimator> parse_estimator_list(std::string_view comma_separated);
std::vector<Estimator> all_estimators();

struct ScoringContext {
  SoftrunConfig mano;
  double mde_temperature = 1.0;
  SourceInfo source;
  /// Precomputed ATC threshold; fitted from `source` on first use otherwise.
  std::optional<double> atc_threshold;
  SinkhornOptions sinkhorn;
};

struct ScoreReport {
  std::string dataset_id;
  std::size_t n_samples = 0;
  std::map<std::string, double> scores;
  /// Present when MaNo was requested.
  std::optional<ManoResult> mano;
  bool cot_default_marginal = false;
  bool cot_converged = true;
};

/// Fills `ctx.atc_threshold` from the validation data when ATC is requested
/// and no threshold is set yet.
void prepare_context(ScoringContext& ctx, std::span<const Estimator> estimators);

ScoreReport score_dataset(std::string dataset_id, const LogitsMatrix& logits, std::span<const Estimator> estimators,
                          const ScoringContext& ctx);

}  // namespace mano
