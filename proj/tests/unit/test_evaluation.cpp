#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mano/error.hpp"
#include "mano/evaluation.hpp"
#include "oracles.hpp"

using namespace mano;

namespace {

Errc error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected mano::Error");
  return Errc::io;
}

EvalRecord record(std::string id, std::map<std::string, double> scores, std::optional<double> acc) {
  return {std::move(id), std::move(scores), acc, 100};
}

// R^2 = 1 - SS_res / SS_tot from the normal-equation line, clamped.
double oracle_r2(std::span<const double> x, std::span<const double> y) {
  const auto line = oracle::normal_equation_fit(x, y);
  double my = 0.0;
  for (double v : y) my += v / static_cast<double>(y.size());
  double res = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (line.slope * x[i] + line.intercept);
    res += e * e;
    tot += (y[i] - my) * (y[i] - my);
  }
  return std::clamp(1.0 - res / tot, 0.0, 1.0);
}

}  // namespace

TEST_CASE("accuracy examples") {
  const Matrix onehot{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  const std::vector<std::int64_t> labels{0, 1, 2, 0};
  CHECK(accuracy(LogitsMatrix(onehot), labels) == 1.0);
  const std::vector<std::int64_t> shifted{1, 2, 0, 1};
  CHECK(accuracy(LogitsMatrix(onehot), shifted) == 0.0);

  // Ties go to the lowest index: row 2 predicts class 0.
  const Matrix mixed{{0.1, 2, -1}, {3, 3, 0}, {0, 0, 0}, {-2, -1, -3}, {5, 1, 5.5}};
  const std::vector<std::int64_t> y{1, 1, 0, 1, 0};
  std::size_t correct = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (mixed(i, k) > mixed(i, best)) best = k;
    correct += static_cast<std::int64_t>(best) == y[i];
  }
  CHECK(accuracy(LogitsMatrix(mixed), y) == static_cast<double>(correct) / 5);
  CHECK(accuracy(LogitsMatrix(mixed), y) == 0.6);

  const std::vector<std::int64_t> out_of_range{0, 1, 3, 0};
  CHECK(error_code([&] { accuracy(LogitsMatrix(onehot), out_of_range); }) == Errc::invalid_input);
  const std::vector<std::int64_t> too_short{0};
  CHECK(error_code([&] { accuracy(LogitsMatrix(onehot), too_short); }) == Errc::invalid_input);
}

TEST_CASE("r squared examples") {
  const double x[] = {1, 2, 3, 4, 5};
  const double y[] = {3, 5, 7, 9, 11};
  CHECK(r_squared(x, y) == doctest::Approx(1.0).epsilon(1e-15));

  const double x3[] = {1, 2, 3};
  const double y3[] = {1, 2, 2};
  CHECK(std::abs(r_squared(x3, y3) - 0.75) < 1e-12);

  std::mt19937_64 gen(51);
  std::normal_distribution<double> noise(0, 1);
  std::vector<double> xs(20000), ys(20000);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = noise(gen);
    ys[i] = 5 + noise(gen);
  }
  CHECK(r_squared(xs, ys) < 1e-3);

  const double flat[] = {2, 2, 2};
  CHECK(error_code([&] { r_squared(flat, y3); }) == Errc::degenerate_fit);
  CHECK(error_code([&] { r_squared(x3, flat); }) == Errc::degenerate_fit);
  const double one[] = {1};
  CHECK(error_code([&] { r_squared(one, one); }) == Errc::invalid_input);
}

TEST_CASE("r squared matches the normal-equation oracle and is affine invariant") {
  std::mt19937_64 gen(52);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + trial % 30;
    std::vector<double> x(n), y(n), x2(n), y2(n);
    const double a = u(gen) + 4, b = u(gen), c = -(u(gen) + 4), d = u(gen);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(gen);
      y[i] = 0.5 * x[i] + u(gen);
      x2[i] = a * x[i] + b;
      y2[i] = c * y[i] + d;
    }
    const double r2 = r_squared(x, y);
    CHECK(r2 == doctest::Approx(oracle_r2(x, y)).epsilon(1e-10));
    CHECK(r_squared(x2, y2) == doctest::Approx(r2).epsilon(1e-10));
  }
}

TEST_CASE("spearman examples") {
  const double x[] = {1, 2, 3, 4};
  const double up[] = {10, 20, 30, 40};
  const double down[] = {4, 3, 2, 1};
  CHECK(spearman_rho(x, up) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman_rho(x, down) == doctest::Approx(-1.0).epsilon(1e-15));

  const double tied[] = {1, 2, 2, 3};
  const double y[] = {1, 2, 3, 4};
  const auto rx = oracle::brute_force_ranks(tied);
  const auto ry = oracle::brute_force_ranks(y);
  CHECK(rx == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(average_ranks(tied) == rx);
  CHECK(spearman_rho(tied, y) == doctest::Approx(oracle::pearson(rx, ry)).epsilon(1e-14));
  CHECK(spearman_rho(tied, y) == doctest::Approx(4.5 / std::sqrt(4.5 * 5)).epsilon(1e-14));

  const double flat[] = {1, 1, 1, 1};
  CHECK(error_code([&] { spearman_rho(flat, y); }) == Errc::degenerate_fit);
}

TEST_CASE("spearman matches the rank oracle and ignores monotone transforms") {
  std::mt19937_64 gen(53);
  std::uniform_int_distribution<int> small(0, 6);
  std::uniform_real_distribution<double> pos(0.1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + trial % 25;
    std::vector<double> x(n), y(n), tx(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = trial % 2 ? pos(gen) : 0.1 + small(gen);  // half the cases carry ties
      y[i] = small(gen) + pos(gen);
      tx[i] = x[i] * x[i] * x[i] + 5;
    }
    const auto rx = oracle::brute_force_ranks(x);
    const auto ry = oracle::brute_force_ranks(y);
    CHECK(average_ranks(x) == rx);
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    const double rho = spearman_rho(x, y);
    CHECK(rho == doctest::Approx(oracle::pearson(rx, ry)).epsilon(1e-12));
    CHECK(spearman_rho(tx, y) == doctest::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("mae examples") {
  const double a[] = {0.1, 0.5, 0.9};
  CHECK(mae(a, a) == 0.0);
  const double p[] = {0.5}, q[] = {0.7};
  CHECK(mae(p, q) == doctest::Approx(0.2).epsilon(1e-15));
  const double b[] = {0.2, 0.1, 1.0};
  CHECK(mae(a, b) == doctest::Approx((0.1 + 0.4 + 0.1) / 3).epsilon(1e-15));
  CHECK(error_code([&] { mae(a, p); }) == Errc::invalid_input);
}

TEST_CASE("regression fit examples") {
  const std::vector<EvalRecord> two{record("a", {{"s", 0.2}}, 0.3), record("b", {{"s", 0.6}}, 0.9)};
  const auto m2 = fit_regression(two, "s");
  CHECK(m2.slope == doctest::Approx(1.5));
  CHECK(m2.intercept == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m2.fit_r2 == 1.0);
  CHECK(m2.estimator_name == "s");

  std::vector<EvalRecord> line;
  for (int i = 0; i < 5; ++i) line.push_back(record(std::to_string(i), {{"s", i * 0.1}}, 0.2 + i * 0.15));
  CHECK(fit_regression(line, "s").fit_r2 == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<EvalRecord> three{record("a", {{"s", 1}}, 0.1), record("b", {{"s", 2}}, 0.2),
                                      record("c", {{"s", 3}}, 0.2)};
  const double xs[] = {1, 2, 3}, ys[] = {0.1, 0.2, 0.2};
  const auto expected = oracle::normal_equation_fit(xs, ys);
  const auto m3 = fit_regression(three, "s");
  CHECK(m3.slope == doctest::Approx(expected.slope).epsilon(1e-14));
  CHECK(m3.intercept == doctest::Approx(expected.intercept).epsilon(1e-14));
  CHECK(m3.fit_r2 == doctest::Approx(0.75).epsilon(1e-12));

  const std::vector<EvalRecord> one_labeled{record("a", {{"s", 1}}, 0.1), record("b", {{"s", 2}}, std::nullopt)};
  CHECK(error_code([&] { fit_regression(one_labeled, "s"); }) == Errc::missing_data);
  const std::vector<EvalRecord> flat{record("a", {{"s", 1}}, 0.1), record("b", {{"s", 1}}, 0.4)};
  CHECK(error_code([&] { fit_regression(flat, "s"); }) == Errc::degenerate_fit);
}

TEST_CASE("predictions are clamped to the unit interval") {
  const RegressionModel identity{1.0, 0.0, 1.0, "s"};
  CHECK(predict_accuracy(identity, 0.42) == 0.42);
  CHECK(predict_accuracy(identity, 1.7) == 1.0);
  CHECK(predict_accuracy(identity, -0.2) == 0.0);
  const RegressionModel m{-2.0, 1.5, 0.9, "s"};
  CHECK(predict_accuracy(m, 0.4) == doctest::Approx(0.7).epsilon(1e-15));

  std::mt19937_64 gen(54);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const double v = predict_accuracy({u(gen), u(gen), 0.0, "s"}, u(gen));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("benchmark report on ideal and anti-monotone estimators") {
  std::vector<EvalRecord> records;
  for (int i = 0; i < 12; ++i) {
    const double acc = 0.3 + 0.05 * i;
    records.push_back(record("set" + std::to_string(100 + i), {{"ideal", acc}, {"cot", 1 - acc}}, acc));
  }
  const auto report = benchmark_report(records);
  REQUIRE(report.size() == 2);
  for (const auto& m : report) {
    CHECK(*m.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*m.abs_rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*m.mae_cv < 1e-12);
  }
  const auto cot = std::find_if(report.begin(), report.end(), [](const auto& m) { return m.estimator == "cot"; });
  CHECK(*cot->rho == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("benchmark report matches a recomputation from primitives") {
  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 20; ++i) {
    const double acc = u(gen);
    records.push_back(record("ds" + std::to_string(19 - i), {{"a", acc + 0.2 * u(gen)}, {"b", u(gen)}}, acc));
  }
  records.push_back(record("unlabeled", {{"a", 0.5}, {"b", 0.5}}, std::nullopt));

  const auto report = benchmark_report(records);
  REQUIRE(report.size() == 2);

  std::vector<EvalRecord> sorted(records.begin(), records.end() - 1);
  std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) { return l.dataset_id < r.dataset_id; });
  for (const auto& m : report) {
    std::vector<double> x, y;
    for (const auto& r : sorted) {
      x.push_back(r.scores.at(m.estimator));
      y.push_back(*r.true_accuracy);
    }
    CHECK(*m.r2 == doctest::Approx(oracle_r2(x, y)).epsilon(1e-10));
    const double rho = oracle::pearson(oracle::brute_force_ranks(x), oracle::brute_force_ranks(y));
    CHECK(*m.rho == doctest::Approx(rho).epsilon(1e-12));
    CHECK(*m.abs_rho == doctest::Approx(std::abs(rho)).epsilon(1e-12));

    // Ten folds over sorted positions, i % 10 == f held out.
    double total = 0.0;
    for (std::size_t f = 0; f < 10; ++f) {
      std::vector<double> tx, ty;
      for (std::size_t i = 0; i < sorted.size(); ++i)
        if (i % 10 != f) {
          tx.push_back(x[i]);
          ty.push_back(y[i]);
        }
      const auto line = oracle::normal_equation_fit(tx, ty);
      double fold = 0.0, count = 0.0;
      for (std::size_t i = f; i < sorted.size(); i += 10) {
        fold += std::abs(std::clamp(line.slope * x[i] + line.intercept, 0.0, 1.0) - y[i]);
        count += 1.0;
      }
      total += fold / count;
    }
    CHECK(*m.mae_cv == doctest::Approx(total / 10).epsilon(1e-10));
  }
}

TEST_CASE("benchmark report is invariant to record order") {
  std::mt19937_64 gen(56);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 15; ++i) records.push_back(record("r" + std::to_string(i), {{"s", u(gen)}}, u(gen)));
  const auto base = benchmark_report(records);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(records.begin(), records.end(), gen);
    const auto shuffled = benchmark_report(records);
    CHECK(shuffled[0].r2 == base[0].r2);
    CHECK(shuffled[0].rho == base[0].rho);
    CHECK(shuffled[0].mae_cv == base[0].mae_cv);
  }
}

TEST_CASE("benchmark report edge cases") {
  const std::vector<EvalRecord> two{record("a", {{"s", 1}}, 0.1), record("b", {{"s", 2}}, 0.2),
                                    record("c", {{"s", 3}}, std::nullopt)};
  CHECK(error_code([&] { benchmark_report(two); }) == Errc::missing_data);

  // A constant estimator has undefined metrics rather than failing the report.
  const std::vector<EvalRecord> flat{record("a", {{"s", 1}, {"c", 0.5}}, 0.1),
                                     record("b", {{"s", 2}, {"c", 0.5}}, 0.2),
                                     record("c", {{"s", 3}, {"c", 0.5}}, 0.4)};
  const auto report = benchmark_report(flat);
  const auto c = std::find_if(report.begin(), report.end(), [](const auto& m) { return m.estimator == "c"; });
  REQUIRE(c != report.end());
  CHECK_FALSE(c->r2.has_value());
  CHECK_FALSE(c->rho.has_value());
  CHECK_FALSE(c->mae_cv.has_value());

  // Only keys present on every labeled record are reported.
  const std::vector<EvalRecord> partial{record("a", {{"s", 1}, {"x", 1}}, 0.1), record("b", {{"s", 2}}, 0.2),
                                        record("c", {{"s", 3}, {"x", 2}}, 0.4)};
  const auto shared = benchmark_report(partial);
  REQUIRE(shared.size() == 1);
  CHECK(shared[0].estimator == "s");
}
