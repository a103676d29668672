#include "mano/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mano/error.hpp"
#include "mano/numerics.hpp"

namespace mano {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
  if (a.size() != b.size()) throw Error(Errc::invalid_input, "vectors differ in length");
  if (a.size() < min_len) {
    throw Error(Errc::invalid_input, "need at least " + std::to_string(min_len) + " points");
  }
}

double mean(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

struct LineFit {
  double slope;
  double intercept;
  double ss_res;
  double ss_tot;
};

LineFit ols(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  LineFit fit{};
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  CompensatedSum res;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.slope * x[i] + fit.intercept);
    res.add(e * e);
  }
  fit.ss_res = res.value();
  fit.ss_tot = syy.value();
  return fit;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (sxx.value() == 0.0 || syy.value() == 0.0) throw Error(Errc::degenerate_fit, "zero rank variance");
  return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

struct Pairs {
  std::vector<double> scores;
  std::vector<double> accuracies;
};

Pairs labeled_pairs(std::span<const EvalRecord> records, std::string_view estimator) {
  Pairs out;
  for (const auto& r : records) {
    if (!r.true_accuracy) continue;
    const auto it = r.scores.find(std::string(estimator));
    if (it == r.scores.end()) continue;
    out.scores.push_back(it->second);
    out.accuracies.push_back(*r.true_accuracy);
  }
  return out;
}

template <class F>
std::optional<double> optional_metric(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::degenerate_fit) return std::nullopt;
    throw;
  }
}

}  // namespace

double accuracy(const LogitsMatrix& logits, std::span<const std::int64_t> labels) {
  if (labels.size() != logits.n_rows()) {
    throw Error(Errc::invalid_input, "label count " + std::to_string(labels.size()) + " does not match " +
                                         std::to_string(logits.n_rows()) + " logit rows");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= logits.n_cols()) {
      throw Error(Errc::invalid_input, "label " + std::to_string(y) + " at row " + std::to_string(i) +
                                           " outside [0, " + std::to_string(logits.n_cols()) + ")");
    }
    if (argmax(logits.row(i)) == static_cast<std::size_t>(y)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double r_squared(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 2);
  if (is_constant(x)) throw Error(Errc::degenerate_fit, "R^2 undefined for constant x");
  if (is_constant(y)) throw Error(Errc::degenerate_fit, "R^2 undefined for constant y");
  const LineFit fit = ols(x, y);
  return std::clamp(1.0 - fit.ss_res / fit.ss_tot, 0.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, 2);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double mae(std::span<const double> predicted, std::span<const double> actual) {
  require_same_length(predicted, actual, 1);
  CompensatedSum s;
  for (std::size_t i = 0; i < predicted.size(); ++i) s.add(std::abs(predicted[i] - actual[i]));
  return s.value() / static_cast<double>(predicted.size());
}

RegressionModel fit_regression(std::span<const EvalRecord> records, std::string_view estimator) {
  const Pairs pairs = labeled_pairs(records, estimator);
  if (pairs.scores.size() < 2) {
    throw Error(Errc::missing_data, "regression on '" + std::string(estimator) + "' needs >= 2 labeled records");
  }
  if (is_constant(pairs.scores)) {
    throw Error(Errc::degenerate_fit, "regression on '" + std::string(estimator) + "': scores have zero variance");
  }
  const LineFit fit = ols(pairs.scores, pairs.accuracies);
  RegressionModel model;
  model.slope = fit.slope;
  model.intercept = fit.intercept;
  model.fit_r2 = fit.ss_tot > 0.0 ? std::clamp(1.0 - fit.ss_res / fit.ss_tot, 0.0, 1.0) : 1.0;
  model.estimator_name = std::string(estimator);
  return model;
}

double predict_accuracy(const RegressionModel& model, double score) {
  return std::clamp(model.slope * score + model.intercept, 0.0, 1.0);
}

std::vector<EstimatorMetrics> benchmark_report(std::span<const EvalRecord> records) {
  std::vector<EvalRecord> labeled;
  for (const auto& r : records)
    if (r.true_accuracy) labeled.push_back(r);
  if (labeled.size() < 3) {
    throw Error(Errc::missing_data, "benchmark report needs >= 3 labeled records, got " +
                                        std::to_string(labeled.size()));
  }
  std::sort(labeled.begin(), labeled.end(),
            [](const EvalRecord& a, const EvalRecord& b) { return a.dataset_id < b.dataset_id; });

  std::vector<std::string> names;
  for (const auto& [name, value] : labeled.front().scores) {
    const bool shared = std::all_of(labeled.begin(), labeled.end(),
                                    [&](const EvalRecord& r) { return r.scores.count(name) != 0; });
    if (shared) names.push_back(name);
  }

  const std::size_t n = labeled.size();
  const std::size_t folds = std::min<std::size_t>(10, n);

  std::vector<EstimatorMetrics> out;
  for (const auto& name : names) {
    const Pairs pairs = labeled_pairs(labeled, name);
    EstimatorMetrics m;
    m.estimator = name;
    m.r2 = optional_metric([&] { return r_squared(pairs.scores, pairs.accuracies); });
    m.rho = optional_metric([&] { return spearman_rho(pairs.scores, pairs.accuracies); });
    if (m.rho) m.abs_rho = std::abs(*m.rho);
    m.mae_cv = optional_metric([&] {
      CompensatedSum fold_mae;
      for (std::size_t f = 0; f < folds; ++f) {
        std::vector<EvalRecord> train;
        std::vector<double> predicted, actual;
        for (std::size_t i = 0; i < n; ++i) {
          if (i % folds != f) train.push_back(labeled[i]);
        }
        const RegressionModel model = fit_regression(train, name);
        for (std::size_t i = f; i < n; i += folds) {
          predicted.push_back(predict_accuracy(model, labeled[i].scores.at(name)));
          actual.push_back(*labeled[i].true_accuracy);
        }
        fold_mae.add(mae(predicted, actual));
      }
      return fold_mae.value() / static_cast<double>(folds);
    });
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace mano
