#include "mano/estimators.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "mano/error.hpp"

namespace mano {

namespace {

constexpr std::array<EstimatorInfo, 7> kRegistry{{
    {Estimator::mano, "mano", +1, "softrun(eta,taylor_order) + entrywise Lp, p configurable"},
    {Estimator::confscore, "confscore", +1, "mean max-softmax"},
    {Estimator::entropy, "entropy", +1, "negative mean Shannon entropy (nats)"},
    {Estimator::atc, "atc", +1, "max-softmax threshold fitted on validation error"},
    {Estimator::nuclear, "nuclear", +1, "nuclear norm of softmax / sqrt(NK)"},
    {Estimator::mde, "mde", +1, "mean T*logsumexp(q/T), T=1"},
    {Estimator::cot, "cot", -1, "entropic OT to label-marginal vertices, TV cost, eps=0.01"},
}};

}  // namespace

std::span<const EstimatorInfo> registered_estimators() noexcept { return kRegistry; }

const EstimatorInfo& estimator_info(Estimator id) {
  for (const auto& info : kRegistry)
    if (info.id == id) return info;
  throw Error(Errc::invalid_input, "unregistered estimator");
}

Estimator parse_estimator(std::string_view name) {
  for (const auto& info : kRegistry)
    if (info.name == name) return info.id;
  throw Error(Errc::invalid_input, "unknown estimator '" + std::string(name) + "'");
}

std::vector<Estimator> parse_estimator_list(std::string_view comma_separated) {
  std::vector<Estimator> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const std::size_t end = std::min(comma_separated.find(',', start), comma_separated.size());
    const auto token = comma_separated.substr(start, end - start);
    if (!token.empty()) {
      const Estimator e = parse_estimator(token);
      if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
    start = end + 1;
  }
  if (out.empty()) throw Error(Errc::invalid_input, "estimator list is empty");
  return out;
}

std::vector<Estimator> all_estimators() {
  std::vector<Estimator> out;
  for (const auto& info : kRegistry) out.push_back(info.id);
  return out;
}

void prepare_context(ScoringContext& ctx, std::span<const Estimator> estimators) {
  const bool wants_atc = std::find(estimators.begin(), estimators.end(), Estimator::atc) != estimators.end();
  if (wants_atc && !ctx.atc_threshold) ctx.atc_threshold = atc_fit(ctx.source);
}

ScoreReport score_dataset(std::string dataset_id, const LogitsMatrix& logits, std::span<const Estimator> estimators,
                          const ScoringContext& ctx) {
  ScoreReport report;
  report.dataset_id = std::move(dataset_id);
  report.n_samples = logits.n_rows();
  for (const Estimator e : estimators) {
    const std::string name(estimator_info(e).name);
    switch (e) {
      case Estimator::mano: {
        report.mano = mano_score(logits, ctx.mano);
        report.scores[name] = report.mano->score;
        break;
      }
      case Estimator::confscore: report.scores[name] = conf_score(logits); break;
      case Estimator::entropy: report.scores[name] = entropy_score(logits); break;
      case Estimator::atc: {
        const double t = ctx.atc_threshold ? *ctx.atc_threshold : atc_fit(ctx.source);
        report.scores[name] = atc_score(logits, t);
        break;
      }
      case Estimator::nuclear: report.scores[name] = nuclear_score(logits); break;
      case Estimator::mde: report.scores[name] = mde_score(logits, ctx.mde_temperature); break;
      case Estimator::cot: {
        const CotResult cot = cot_score(logits, ctx.source, ctx.sinkhorn);
        report.scores[name] = cot.score;
        report.cot_default_marginal = cot.default_marginal;
        report.cot_converged = cot.converged;
        break;
      }
    }
  }
  return report;
}

}  // namespace mano
