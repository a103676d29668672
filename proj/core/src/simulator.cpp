#include "mano/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mano/error.hpp"
#include "mano/io.hpp"
#include "mano/numerics.hpp"
#include "mano/random.hpp"

namespace mano::sim {

namespace {

constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;
constexpr std::uint64_t kDirectionStream = 0xD1F7;
constexpr std::uint64_t kTiltStream = 0x717;
constexpr int kMaxSeverity = 5;

Dataset sample(const Matrix& means, double sigma, std::size_t per_class, std::uint64_t seed) {
  const std::size_t k = means.rows();
  const std::size_t d = means.cols();
  Rng rng(seed);
  Dataset out{Matrix(per_class * k, d), std::vector<std::int64_t>(per_class * k)};
  for (std::size_t i = 0; i < per_class * k; ++i) {
    const std::size_t label = i % k;
    out.y[i] = static_cast<std::int64_t>(label);
    for (std::size_t j = 0; j < d; ++j) out.x(i, j) = means(label, j) + sigma * rng.normal();
  }
  return out;
}

}  // namespace

void TaskSpec::validate() const {
  if (n_classes < 2) throw Error(Errc::invalid_input, "task needs K >= 2 classes");
  if (input_dim < 2) throw Error(Errc::invalid_input, "task needs input dimension >= 2");
  if (!(class_cov_scale > 0.0) || !std::isfinite(class_cov_scale)) {
    throw Error(Errc::invalid_input, "class_cov_scale must be positive");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(Errc::invalid_input, "radius must be positive");
  if (n_train < 1 || n_test < 1) throw Error(Errc::invalid_input, "per-class sample counts must be >= 1");
  const Matrix m = means();
  if (m.rows() != n_classes || m.cols() != input_dim) {
    throw Error(Errc::invalid_input, "class means must be K x d");
  }
  for (std::size_t a = 0; a < n_classes; ++a) {
    for (std::size_t b = a + 1; b < n_classes; ++b) {
      const auto ra = m.row(a);
      const auto rb = m.row(b);
      if (std::equal(ra.begin(), ra.end(), rb.begin())) {
        throw Error(Errc::invalid_input, "class means must be pairwise distinct");
      }
    }
  }
}

Matrix TaskSpec::means() const {
  if (class_means) return *class_means;
  const std::size_t k = n_classes;
  Matrix m(k, input_dim);
  if (k <= input_dim) {
    const double scale = radius * std::sqrt(static_cast<double>(k) / static_cast<double>(k - 1));
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < k; ++j) m(c, j) = scale * ((c == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(k));
  } else {
    for (std::size_t c = 0; c < k; ++c) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(k);
      m(c, 0) = radius * std::cos(angle);
      m(c, 1) = radius * std::sin(angle);
    }
  }
  return m;
}

Task generate_task(const TaskSpec& spec) {
  spec.validate();
  Task task;
  task.means = spec.means();
  task.sigma = spec.class_cov_scale;
  task.train = sample(task.means, task.sigma, spec.n_train, derive_seed(spec.seed, kTrainStream));
  task.test = sample(task.means, task.sigma, spec.n_test, derive_seed(spec.seed, kTestStream));
  return task;
}

void ShiftSpec::validate() const {
  if (severity < 0 || severity > kMaxSeverity) throw Error(Errc::invalid_input, "severity must lie in 0..5");
  if (!(mean_drift >= 0.0) || !std::isfinite(mean_drift)) throw Error(Errc::invalid_input, "mean_drift must be >= 0");
  if (!(noise_gain >= 1.0) || !std::isfinite(noise_gain)) throw Error(Errc::invalid_input, "noise_gain must be >= 1");
  if (!(label_marginal_tilt >= 0.0 && label_marginal_tilt < 1.0)) {
    throw Error(Errc::invalid_input, "label_marginal_tilt must lie in [0, 1)");
  }
}

std::vector<double> drift_direction(std::uint64_t direction_seed, std::size_t dim) {
  Rng rng(derive_seed(direction_seed, kDirectionStream));
  std::vector<double> u(dim);
  double norm2 = 0.0;
  while (norm2 == 0.0) {
    for (double& x : u) {
      x = rng.normal();
      norm2 += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : u) x *= inv;
  return u;
}

Dataset apply_shift(const Dataset& clean, const Matrix& class_means, const ShiftSpec& shift) {
  shift.validate();
  if (clean.x.cols() != class_means.cols()) throw Error(Errc::invalid_input, "test set and class means differ in dimension");
  if (shift.severity == 0) return clean;

  const double s = static_cast<double>(shift.severity);
  const auto u = drift_direction(shift.drift_direction_seed, clean.x.cols());
  const double gain = std::pow(shift.noise_gain, s);
  const double offset = s * shift.mean_drift;

  std::vector<double> keep_prob(class_means.rows(), 1.0);
  if (shift.label_marginal_tilt > 0.0) {
    for (std::size_t k = 0; k < keep_prob.size(); ++k) {
      keep_prob[k] = std::pow(1.0 - shift.label_marginal_tilt, static_cast<double>(k) * s / kMaxSeverity);
    }
  }
  Rng rng(derive_seed(shift.drift_direction_seed, kTiltStream + static_cast<std::uint64_t>(shift.severity)));

  std::vector<double> values;
  Dataset out;
  for (std::size_t i = 0; i < clean.x.rows(); ++i) {
    const auto label = static_cast<std::size_t>(clean.y[i]);
    if (label >= class_means.rows()) throw Error(Errc::invalid_input, "test label outside the class range");
    if (shift.label_marginal_tilt > 0.0 && rng.uniform() >= keep_prob[label]) continue;
    for (std::size_t j = 0; j < clean.x.cols(); ++j) {
      const double mean = class_means(label, j);
      values.push_back(mean + offset * u[j] + gain * (clean.x(i, j) - mean));
    }
    out.y.push_back(clean.y[i]);
  }
  if (out.y.empty()) throw Error(Errc::invalid_input, "label tilt removed every test sample");
  out.x = Matrix(out.y.size(), clean.x.cols(), std::move(values));
  return out;
}

LinearClassifier::LinearClassifier(Matrix weights, std::vector<double> bias, TrainingMeta meta)
    : weights_(std::move(weights)), bias_(std::move(bias)), meta_(meta) {
  if (bias_.size() != weights_.rows()) throw Error(Errc::invalid_input, "bias length must equal the class count");
  for (double w : weights_.values())
    if (!std::isfinite(w)) throw Error(Errc::invalid_input, "classifier weights must be finite");
  for (double b : bias_)
    if (!std::isfinite(b)) throw Error(Errc::invalid_input, "classifier bias must be finite");
}

Matrix LinearClassifier::logits(const Matrix& x) const {
  if (x.cols() != weights_.cols()) throw Error(Errc::invalid_input, "input dimension does not match the classifier");
  const std::size_t k = weights_.rows();
  Matrix out(x.rows(), k);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      double z = bias_[c];
      const auto wc = weights_.row(c);
      for (std::size_t j = 0; j < xi.size(); ++j) z += wc[j] * xi[j];
      out(i, c) = z;
    }
  }
  return out;
}

LossGradient softmax_cross_entropy(const Matrix& weights, std::span<const double> bias, const Dataset& data) {
  const std::size_t n = data.x.rows();
  const std::size_t d = data.x.cols();
  const std::size_t k = weights.rows();
  if (n == 0 || data.y.size() != n) throw Error(Errc::invalid_input, "training data is empty or mislabeled");

  LossGradient out{0.0, Matrix(k, d), std::vector<double>(k, 0.0)};
  std::vector<double> z(k);
  CompensatedSum loss;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.x.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      double v = bias[c];
      const auto wc = weights.row(c);
      for (std::size_t j = 0; j < d; ++j) v += wc[j] * xi[j];
      z[c] = v;
    }
    const auto y = static_cast<std::size_t>(data.y[i]);
    const double lse = logsumexp(z);
    loss.add(lse - z[y]);
    for (std::size_t c = 0; c < k; ++c) {
      const double residual = (std::exp(z[c] - lse) - (c == y ? 1.0 : 0.0)) * inv_n;
      out.grad_bias[c] += residual;
      auto gc = out.grad_weights.row(c);
      for (std::size_t j = 0; j < d; ++j) gc[j] += residual * xi[j];
    }
  }
  out.loss = loss.value() * inv_n;
  return out;
}

LinearClassifier train_logistic(const Dataset& train, std::size_t n_classes, const TrainerOptions& options,
                                std::uint64_t seed) {
  if (n_classes < 2) throw Error(Errc::invalid_input, "trainer needs K >= 2");
  if (!(options.lr > 0.0)) throw Error(Errc::invalid_input, "learning rate must be positive");
  std::vector<std::size_t> per_class(n_classes, 0);
  for (const auto y : train.y) {
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes) throw Error(Errc::invalid_input, "training label out of range");
    ++per_class[static_cast<std::size_t>(y)];
  }
  if (std::find(per_class.begin(), per_class.end(), 0) != per_class.end()) {
    throw Error(Errc::invalid_input, "every class needs at least one training sample");
  }

  const std::size_t d = train.x.cols();
  Matrix w(n_classes, d);
  std::vector<double> b(n_classes, 0.0);
  double lr = options.lr;
  int halvings = 0;
  LossGradient current = softmax_cross_entropy(w, b, train);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    while (true) {
      Matrix w_next = w;
      std::vector<double> b_next = b;
      for (std::size_t i = 0; i < w_next.size(); ++i) w_next.values()[i] -= lr * current.grad_weights.values()[i];
      for (std::size_t c = 0; c < n_classes; ++c) b_next[c] -= lr * current.grad_bias[c];
      LossGradient next = softmax_cross_entropy(w_next, b_next, train);
      if (std::isfinite(next.loss) && next.loss <= current.loss + options.monotone_tolerance) {
        w = std::move(w_next);
        b = std::move(b_next);
        current = std::move(next);
        break;
      }
      if (++halvings > options.max_halvings) {
        throw Error(Errc::diverged, "training diverged after " + std::to_string(options.max_halvings) +
                                        " learning-rate halvings");
      }
      lr /= 2.0;
    }
  }
  return LinearClassifier(std::move(w), std::move(b), TrainingMeta{lr, options.epochs, current.loss, seed});
}

std::string shift_id(std::size_t index, const ShiftSpec& shift) {
  std::string idx = std::to_string(index);
  if (idx.size() < 2) idx.insert(0, 2 - idx.size(), '0');
  return "shift" + idx + "-d" + std::to_string(shift.drift_direction_seed) + "-s" + std::to_string(shift.severity);
}

std::vector<ShiftSpec> shift_grid(std::size_t n_directions, std::span<const int> severities, const ShiftSpec& base) {
  std::vector<ShiftSpec> out;
  for (std::size_t dir = 1; dir <= n_directions; ++dir) {
    for (const int s : severities) {
      ShiftSpec spec = base;
      spec.drift_direction_seed = dir;
      spec.severity = s;
      spec.validate();
      out.push_back(spec);
    }
  }
  return out;
}

BenchmarkRun run_benchmark(const TaskSpec& task_spec, std::span<const ShiftSpec> shifts,
                           std::span<const Estimator> estimators, const ScoringContext& base,
                           const TrainerOptions& trainer) {
  const Task task = generate_task(task_spec);
  LinearClassifier model = train_logistic(task.train, task_spec.n_classes, trainer, task_spec.seed);

  BenchmarkRun run{std::move(model), 0.0, {}, {}, {}, {}};
  run.validation = {"clean", run.model.logits(task.test.x), task.test.y};
  const LogitsMatrix clean_logits(run.validation.logits);
  run.clean_accuracy = accuracy(clean_logits, run.validation.labels);

  ScoringContext ctx = base;
  ctx.source.val_logits = clean_logits;
  ctx.source.val_labels = run.validation.labels;
  ctx.source.label_marginal = SourceInfo::empirical_marginal(run.validation.labels, task_spec.n_classes);
  prepare_context(ctx, estimators);

  for (std::size_t i = 0; i < shifts.size(); ++i) {
    const Dataset shifted = apply_shift(task.test, task.means, shifts[i]);
    ScoredSet set{shift_id(i, shifts[i]), run.model.logits(shifted.x), shifted.y};
    const LogitsMatrix logits(set.logits);

    ScoreReport report = score_dataset(set.id, logits, estimators, ctx);
    EvalRecord record{set.id, report.scores, accuracy(logits, set.labels), logits.n_rows()};
    run.reports.push_back(std::move(report));
    run.records.push_back(std::move(record));
    run.sets.push_back(std::move(set));
  }
  return run;
}

void export_benchmark(const BenchmarkRun& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "logits", ec);
  if (!ec) std::filesystem::create_directories(dir / "labels", ec);
  if (ec) throw Error(Errc::io, "cannot create export directory '" + dir.string() + "': " + ec.message());

  io::DatasetManifest manifest;
  auto add = [&](const ScoredSet& set, io::Role role) {
    const auto logits_path = dir / "logits" / (set.id + ".npy");
    const auto labels_path = dir / "labels" / (set.id + ".npy");
    io::write_npy(logits_path, io::ArrayFile::from_matrix(set.logits));
    io::write_npy(labels_path, io::ArrayFile::from_i64(set.labels, {set.labels.size()}));
    manifest.entries.push_back({set.id, logits_path, labels_path, role});
  };
  add(run.validation, io::Role::validation);
  for (const auto& set : run.sets) add(set, io::Role::test);
  io::write_manifest(dir / "manifest.json", manifest);
}

}  // namespace mano::sim
