#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "mano/error.hpp"
#include "mano/estimators.hpp"
#include "mano/evaluation.hpp"
#include "mano/io.hpp"
#include "mano/mano.hpp"
#include "mano/simulator.hpp"

namespace mano::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;

struct CommonOptions {
  std::string estimators;
  double p = 4.0;
  double eta = 5.0;
  int taylor_order = 2;
  std::string output = "table";
  std::uint64_t seed = 0;
};

struct InputOptions {
  std::string manifest;
  std::string logits;
  std::string labels;
  std::string val_id;
};

struct LoadedSet {
  std::string id;
  LogitsMatrix logits;
  std::optional<std::vector<std::int64_t>> labels;
};

struct LoadedInputs {
  std::vector<LoadedSet> tests;
  std::optional<LoadedSet> validation;
};

struct ScoredInputs {
  std::vector<Estimator> estimators;
  std::vector<ScoreReport> reports;
  std::vector<std::optional<double>> accuracies;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  sink->set_pattern("mano: %l: %v");
  auto logger = std::make_shared<spdlog::logger>("mano", sink);
  logger->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("MANO_LOG")) {
    const std::string level(env);
    if (level == "debug") logger->set_level(spdlog::level::debug);
    if (level == "info") logger->set_level(spdlog::level::info);
  }
  return logger;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_estimators = true) {
  if (with_estimators) {
    cmd->add_option("--estimators", opts.estimators, "Comma-separated estimators (default: all)");
  }
  cmd->add_option("--p", opts.p, "Exponent of the entrywise norm")->capture_default_str();
  cmd->add_option("--eta", opts.eta, "Threshold on the softrun criterion")->capture_default_str();
  cmd->add_option("--taylor-order", opts.taylor_order, "Order of the truncated exponential")->capture_default_str();
  cmd->add_option("--output", opts.output, "Output format")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Random seed")->capture_default_str();
}

void add_inputs(CLI::App* cmd, InputOptions& in) {
  auto* manifest = cmd->add_option("--manifest", in.manifest, "Dataset manifest (JSON)");
  auto* logits = cmd->add_option("--logits", in.logits, "Single logits file (.npy or .csv)");
  cmd->add_option("--labels", in.labels, "Labels for --logits")->needs(logits);
  cmd->add_option("--val-id", in.val_id, "Manifest entry used as ATC/COT validation data")->needs(manifest);
  manifest->excludes(logits);
}

SoftrunConfig softrun_config(const CommonOptions& opts) {
  SoftrunConfig cfg;
  cfg.p = opts.p;
  cfg.eta = opts.eta;
  cfg.taylor_order = opts.taylor_order;
  cfg.validate();
  return cfg;
}

LoadedSet load_set(const std::string& id, const fs::path& logits_path, const std::optional<fs::path>& labels_path) {
  LoadedSet set{id, io::read_logits(logits_path), std::nullopt};
  if (labels_path) {
    set.labels = io::read_labels(*labels_path, set.logits.n_cols());
    if (set.labels->size() != set.logits.n_rows()) {
      throw Error(Errc::parse, labels_path->string() + ": " + std::to_string(set.labels->size()) +
                                   " labels for " + std::to_string(set.logits.n_rows()) + " logit rows");
    }
  }
  return set;
}

LoadedInputs load_inputs(const InputOptions& in, spdlog::logger& log) {
  LoadedInputs out;
  if (!in.logits.empty()) {
    const fs::path path(in.logits);
    std::optional<fs::path> labels;
    if (!in.labels.empty()) labels = fs::path(in.labels);
    out.tests.push_back(load_set(path.stem().string(), path, labels));
    return out;
  }
  if (in.manifest.empty()) throw Error(Errc::invalid_input, "one of --manifest or --logits is required");

  const io::DatasetManifest manifest = io::read_manifest(in.manifest);
  bool found_val_id = in.val_id.empty();
  for (const auto& entry : manifest.entries) {
    const bool is_validation = in.val_id.empty() ? entry.role == io::Role::validation : entry.id == in.val_id;
    log.debug("loading '{}' from {}", entry.id, entry.logits_path.string());
    LoadedSet set = load_set(entry.id, entry.logits_path, entry.labels_path);
    if (is_validation) {
      found_val_id = true;
      out.validation = std::move(set);
    } else {
      out.tests.push_back(std::move(set));
    }
  }
  if (!found_val_id) throw Error(Errc::invalid_input, "--val-id '" + in.val_id + "' not found in manifest");
  if (out.validation && !out.validation->labels) {
    throw Error(Errc::missing_data, "validation entry '" + out.validation->id + "' has no labels");
  }
  if (out.tests.empty()) throw Error(Errc::invalid_input, "manifest has no test entries");
  return out;
}

std::vector<Estimator> requested_estimators(const CommonOptions& opts, bool have_validation, spdlog::logger& log) {
  if (!opts.estimators.empty()) return parse_estimator_list(opts.estimators);
  std::vector<Estimator> all = all_estimators();
  if (!have_validation) {
    log.warn("no validation entry: skipping atc");
    all.erase(std::remove(all.begin(), all.end(), Estimator::atc), all.end());
  }
  return all;
}

ScoringContext scoring_context(const CommonOptions& opts, const LoadedInputs& inputs) {
  ScoringContext ctx;
  ctx.mano = softrun_config(opts);
  if (inputs.validation) {
    ctx.source.val_logits = inputs.validation->logits;
    ctx.source.val_labels = *inputs.validation->labels;
    ctx.source.label_marginal =
        SourceInfo::empirical_marginal(*inputs.validation->labels, inputs.validation->logits.n_cols());
  }
  return ctx;
}

ScoredInputs score_inputs(const CommonOptions& opts, const LoadedInputs& inputs, spdlog::logger& log) {
  ScoredInputs out;
  out.estimators = requested_estimators(opts, inputs.validation.has_value(), log);
  ScoringContext ctx = scoring_context(opts, inputs);
  prepare_context(ctx, out.estimators);
  if (ctx.atc_threshold) log.info("atc threshold {:.17g}", *ctx.atc_threshold);
  for (const auto& set : inputs.tests) {
    out.reports.push_back(score_dataset(set.id, set.logits, out.estimators, ctx));
    const auto& report = out.reports.back();
    if (report.cot_default_marginal) log.warn("{}: cot uses a uniform label marginal", set.id);
    if (!report.cot_converged) log.warn("{}: cot sinkhorn did not converge", set.id);
    out.accuracies.push_back(set.labels ? std::optional<double>(accuracy(set.logits, *set.labels)) : std::nullopt);
  }
  return out;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json config_json(const CommonOptions& opts) {
  return json{{"p", opts.p}, {"eta", opts.eta}, {"taylor_order", opts.taylor_order}};
}

json estimators_json(const std::vector<Estimator>& estimators) {
  json arr = json::array();
  for (const Estimator e : estimators) {
    const auto& info = estimator_info(e);
    arr.push_back({{"name", info.name}, {"sign", info.sign}, {"variant", info.variant}});
  }
  return arr;
}

json report_json(const ScoreReport& report, const std::optional<double>& acc) {
  json r;
  r["id"] = report.dataset_id;
  r["n_samples"] = report.n_samples;
  r["true_accuracy"] = optional_number(acc);
  json scores = json::object();
  for (const auto& [name, value] : report.scores) scores[name] = value;
  r["scores"] = std::move(scores);
  if (report.mano) {
    r["phi"] = report.mano->phi_value;
    r["branch"] = to_string(report.mano->branch);
    r["mean_tsallis"] = report.mano->mean_tsallis;
  }
  json flags = json::array();
  if (report.cot_default_marginal) flags.push_back("cot_default_marginal");
  if (!report.cot_converged) flags.push_back("cot_not_converged");
  r["flags"] = std::move(flags);
  return r;
}

std::vector<EvalRecord> to_records(const ScoredInputs& scored) {
  std::vector<EvalRecord> records;
  for (std::size_t i = 0; i < scored.reports.size(); ++i) {
    const auto& r = scored.reports[i];
    records.push_back({r.dataset_id, r.scores, scored.accuracies[i], r.n_samples});
  }
  return records;
}

std::string fmt_number(const std::optional<double>& v, int precision = 6) {
  if (!v) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << *v;
  return s.str();
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << "  ";
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
      } else {
        out << std::right << std::setw(static_cast<int>(width[c])) << cells[c];
      }
    }
    out << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& row : rows) line(row);
}

void print_scores_table(std::ostream& out, const ScoredInputs& scored) {
  std::vector<std::string> header{"dataset", "n"};
  for (const Estimator e : scored.estimators) header.emplace_back(estimator_info(e).name);
  header.insert(header.end(), {"phi", "branch", "accuracy"});
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < scored.reports.size(); ++i) {
    const auto& r = scored.reports[i];
    std::vector<std::string> row{r.dataset_id, std::to_string(r.n_samples)};
    for (const Estimator e : scored.estimators) row.push_back(fmt_number(r.scores.at(std::string(estimator_info(e).name))));
    row.push_back(r.mano ? fmt_number(r.mano->phi_value) : "-");
    row.push_back(r.mano ? std::string(to_string(r.mano->branch)) : "-");
    row.push_back(fmt_number(scored.accuracies[i]));
    rows.push_back(std::move(row));
  }
  print_table(out, header, rows);
}

json bench_document(const CommonOptions& opts, const ScoredInputs& scored) {
  const auto records = to_records(scored);
  const auto metrics = benchmark_report(records);

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config"] = config_json(opts);
  doc["estimators"] = estimators_json(scored.estimators);
  json recs = json::array();
  for (std::size_t i = 0; i < scored.reports.size(); ++i) recs.push_back(report_json(scored.reports[i], scored.accuracies[i]));
  doc["records"] = std::move(recs);
  json report = json::array();
  for (const Estimator e : scored.estimators) {
    const auto& info = estimator_info(e);
    const auto it = std::find_if(metrics.begin(), metrics.end(),
                                 [&](const EstimatorMetrics& m) { return m.estimator == info.name; });
    if (it == metrics.end()) continue;
    report.push_back({{"estimator", info.name},
                      {"sign", info.sign},
                      {"r2", optional_number(it->r2)},
                      {"rho", optional_number(it->rho)},
                      {"abs_rho", optional_number(it->abs_rho)},
                      {"mae_cv", optional_number(it->mae_cv)}});
  }
  doc["report"] = std::move(report);
  return doc;
}

void print_bench_table(std::ostream& out, const json& doc) {
  std::vector<std::vector<std::string>> rows;
  auto num = [](const json& v) { return v.is_null() ? std::optional<double>() : std::optional<double>(v.get<double>()); };
  for (const auto& m : doc["report"]) {
    rows.push_back({m["estimator"].get<std::string>(), std::to_string(m["sign"].get<int>()), fmt_number(num(m["r2"])),
                    fmt_number(num(m["rho"])), fmt_number(num(m["abs_rho"])), fmt_number(num(m["mae_cv"]))});
  }
  print_table(out, {"estimator", "sign", "r2", "rho", "abs_rho", "mae_cv"}, rows);
}

std::size_t labeled_count(const ScoredInputs& scored) {
  return static_cast<std::size_t>(
      std::count_if(scored.accuracies.begin(), scored.accuracies.end(), [](const auto& a) { return a.has_value(); }));
}

int cmd_score(const CommonOptions& opts, const InputOptions& in, std::ostream& out, spdlog::logger& log) {
  const LoadedInputs inputs = load_inputs(in, log);
  const ScoredInputs scored = score_inputs(opts, inputs, log);
  if (opts.output == "json") {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = config_json(opts);
    doc["estimators"] = estimators_json(scored.estimators);
    json datasets = json::array();
    for (std::size_t i = 0; i < scored.reports.size(); ++i) {
      datasets.push_back(report_json(scored.reports[i], scored.accuracies[i]));
    }
    doc["datasets"] = std::move(datasets);
    out << doc.dump(2) << '\n';
  } else {
    print_scores_table(out, scored);
  }
  return kOk;
}

int emit_bench(const CommonOptions& opts, const ScoredInputs& scored, std::ostream& out) {
  const json doc = bench_document(opts, scored);
  if (opts.output == "json") {
    out << doc.dump(2) << '\n';
  } else {
    print_scores_table(out, scored);
    out << '\n';
    print_bench_table(out, doc);
  }
  return kOk;
}

int cmd_bench(const CommonOptions& opts, const InputOptions& in, std::ostream& out, spdlog::logger& log) {
  if (in.manifest.empty()) throw Error(Errc::invalid_input, "bench requires --manifest");
  const LoadedInputs inputs = load_inputs(in, log);
  std::size_t labeled = 0;
  for (const auto& t : inputs.tests)
    if (t.labels) ++labeled;
  if (labeled < 3) {
    throw Error(Errc::missing_data, "need ≥ 3 labeled test sets, got " + std::to_string(labeled));
  }
  const ScoredInputs scored = score_inputs(opts, inputs, log);
  if (labeled_count(scored) < 3) throw Error(Errc::missing_data, "need ≥ 3 labeled test sets");
  return emit_bench(opts, scored, out);
}

struct RegressOptions {
  std::string records;
  std::string estimator = "mano";
  std::string holdout;
  std::string output = "table";
};

int cmd_regress(const RegressOptions& opts, std::ostream& out) {
  std::ifstream in(opts.records);
  if (!in) throw Error(Errc::io, "cannot open '" + opts.records + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse, opts.records + ": " + e.what());
  }

  std::vector<EvalRecord> records;
  try {
    const auto& arr = doc.is_array() ? doc : doc.at("records");
    for (const auto& r : arr) {
      EvalRecord rec;
      rec.dataset_id = r.at("id").get<std::string>();
      for (const auto& [name, value] : r.at("scores").items()) rec.scores[name] = value.get<double>();
      if (r.contains("true_accuracy") && !r.at("true_accuracy").is_null()) rec.true_accuracy = r.at("true_accuracy").get<double>();
      if (r.contains("n_samples")) rec.n_samples = r.at("n_samples").get<std::size_t>();
      records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::schema, opts.records + ": malformed records: " + e.what());
  }

  std::set<std::string> holdout;
  {
    std::stringstream ss(opts.holdout);
    std::string id;
    while (std::getline(ss, id, ','))
      if (!id.empty()) holdout.insert(id);
  }
  for (const auto& id : holdout) {
    const bool known = std::any_of(records.begin(), records.end(), [&](const EvalRecord& r) { return r.dataset_id == id; });
    if (!known) throw Error(Errc::invalid_input, "holdout id '" + id + "' not found in records");
  }

  std::vector<EvalRecord> fit_set, held;
  for (const auto& r : records) (holdout.count(r.dataset_id) ? held : fit_set).push_back(r);
  const RegressionModel model = fit_regression(fit_set, opts.estimator);

  json predictions = json::array();
  std::vector<double> predicted, actual;
  for (const auto& r : held) {
    const auto it = r.scores.find(opts.estimator);
    if (it == r.scores.end()) {
      throw Error(Errc::invalid_input, "record '" + r.dataset_id + "' has no '" + opts.estimator + "' score");
    }
    const double pred = predict_accuracy(model, it->second);
    predictions.push_back({{"id", r.dataset_id}, {"score", it->second}, {"predicted", pred},
                           {"actual", optional_number(r.true_accuracy)}});
    if (r.true_accuracy) {
      predicted.push_back(pred);
      actual.push_back(*r.true_accuracy);
    }
  }
  const std::optional<double> err = predicted.empty() ? std::nullopt : std::optional<double>(mae(predicted, actual));

  if (opts.output == "json") {
    json result;
    result["schema_version"] = kSchemaVersion;
    result["model"] = {{"estimator", model.estimator_name}, {"slope", model.slope}, {"intercept", model.intercept},
                       {"fit_r2", model.fit_r2}, {"n_fit", fit_set.size()}};
    result["predictions"] = std::move(predictions);
    result["mae"] = optional_number(err);
    out << result.dump(2) << '\n';
  } else {
    out << "model: accuracy = " << fmt_number(model.slope, 9) << " * " << model.estimator_name << " + "
        << fmt_number(model.intercept, 9) << "  (fit R^2 " << fmt_number(model.fit_r2) << ", n=" << fit_set.size()
        << ")\n";
    if (!held.empty()) {
      std::vector<std::vector<std::string>> rows;
      for (const auto& p : predictions) {
        rows.push_back({p["id"].get<std::string>(), fmt_number(p["score"].get<double>()),
                        fmt_number(p["predicted"].get<double>()),
                        p["actual"].is_null() ? "-" : fmt_number(p["actual"].get<double>())});
      }
      out << '\n';
      print_table(out, {"dataset", "score", "predicted", "actual"}, rows);
      out << "\nmae: " << fmt_number(err) << '\n';
    }
  }
  return kOk;
}

// Defaults of the reference benchmark. The drift is stronger and the noise
// gain milder than ShiftSpec's defaults: amplified noise inflates logit norms
// of a linear model, making it more confident as it gets less accurate.
sim::ShiftSpec reference_shift() {
  sim::ShiftSpec s;
  s.mean_drift = 0.8;
  s.noise_gain = 1.05;
  return s;
}

struct SimulateOptions {
  sim::TaskSpec task;
  std::size_t directions = 4;
  std::vector<int> severities{1, 2, 3, 4, 5};
  sim::ShiftSpec shift = reference_shift();
  sim::TrainerOptions trainer;
  std::string export_dir;
};

int cmd_simulate(const CommonOptions& opts, const SimulateOptions& sopts, std::ostream& out, spdlog::logger& log) {
  std::vector<Estimator> estimators = opts.estimators.empty() ? all_estimators() : parse_estimator_list(opts.estimators);
  const auto shifts = sim::shift_grid(sopts.directions, sopts.severities, sopts.shift);
  ScoringContext base;
  base.mano = softrun_config(opts);

  const sim::BenchmarkRun run = sim::run_benchmark(sopts.task, shifts, estimators, base, sopts.trainer);
  log.info("trained: final loss {:.6f}, lr {}, clean accuracy {:.4f}", run.model.meta().final_loss,
           run.model.meta().lr, run.clean_accuracy);
  if (!sopts.export_dir.empty()) {
    sim::export_benchmark(run, sopts.export_dir);
    log.info("exported {} sets to {}", run.sets.size() + 1, sopts.export_dir);
  }

  ScoredInputs scored;
  scored.estimators = estimators;
  scored.reports = run.reports;
  for (const auto& r : run.records) scored.accuracies.push_back(r.true_accuracy);

  if (labeled_count(scored) < 3) {
    // Too few sets for correlation metrics; emit the scores only.
    if (opts.output == "json") {
      json doc;
      doc["schema_version"] = kSchemaVersion;
      doc["config"] = config_json(opts);
      doc["estimators"] = estimators_json(scored.estimators);
      json recs = json::array();
      for (std::size_t i = 0; i < scored.reports.size(); ++i) recs.push_back(report_json(scored.reports[i], scored.accuracies[i]));
      doc["records"] = std::move(recs);
      out << doc.dump(2) << '\n';
    } else {
      print_scores_table(out, scored);
    }
    return kOk;
  }
  return emit_bench(opts, scored, out);
}

struct PhiStudyCli {
  std::vector<std::size_t> k{2, 5, 10, 25, 50, 100};
  std::size_t n_models = 100000;
  std::size_t n_samples = 1;
  double bound = 5.0;
};

int cmd_phi_study(const CommonOptions& opts, const PhiStudyCli& p, std::ostream& out) {
  PhiStudyOptions study;
  study.class_counts = p.k;
  study.n_models = p.n_models;
  study.n_samples = p.n_samples;
  study.logit_bound = p.bound;
  study.seed = opts.seed;
  const auto intervals = phi_confidence_study(study);
  if (opts.output == "json") {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["n_models"] = p.n_models;
    doc["n_samples"] = p.n_samples;
    doc["bound"] = p.bound;
    doc["seed"] = opts.seed;
    json arr = json::array();
    for (const auto& iv : intervals) arr.push_back({{"k", iv.num_classes}, {"low", iv.low}, {"high", iv.high}});
    doc["intervals"] = std::move(arr);
    out << doc.dump(2) << '\n';
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& iv : intervals) {
      rows.push_back({std::to_string(iv.num_classes), fmt_number(iv.low), fmt_number(iv.high),
                      iv.low > opts.eta ? "softmax" : (iv.high <= opts.eta ? "taylor" : "mixed")});
    }
    print_table(out, {"K", "phi_low_0.5%", "phi_high_99.5%", "branch@eta"}, rows);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-free accuracy estimation from classifier logits"};
  app.name("mano");
  app.require_subcommand(1);

  CommonOptions score_opts, bench_opts, sim_opts, phi_opts;
  InputOptions score_in, bench_in;
  RegressOptions regress_opts;
  SimulateOptions simulate;
  PhiStudyCli phi_cli;

  auto* score = app.add_subcommand("score", "Score datasets with the selected estimators");
  add_common(score, score_opts);
  add_inputs(score, score_in);

  auto* bench = app.add_subcommand("bench", "Correlate estimator scores with accuracy over labeled test sets");
  add_common(bench, bench_opts);
  add_inputs(bench, bench_in);

  auto* regress = app.add_subcommand("regress", "Fit accuracy ~ score and predict held-out sets");
  regress->add_option("--records", regress_opts.records, "Records JSON written by bench --output json")->required();
  regress->add_option("--estimator", regress_opts.estimator, "Estimator to regress on")->capture_default_str();
  regress->add_option("--holdout", regress_opts.holdout, "Comma-separated dataset ids to predict");
  regress->add_option("--output", regress_opts.output, "Output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  auto* simulate_cmd = app.add_subcommand("simulate", "Run the synthetic distribution-shift benchmark");
  sim_opts.seed = simulate.task.seed;
  add_common(simulate_cmd, sim_opts);
  simulate_cmd->add_option("--classes", simulate.task.n_classes, "Number of classes K")->capture_default_str();
  simulate_cmd->add_option("--dim", simulate.task.input_dim, "Input dimension d")->capture_default_str();
  simulate_cmd->add_option("--radius", simulate.task.radius, "Radius of the class means")->capture_default_str();
  simulate_cmd->add_option("--sigma", simulate.task.class_cov_scale, "Class noise scale")->capture_default_str();
  simulate_cmd->add_option("--n-train", simulate.task.n_train, "Training samples per class")->capture_default_str();
  simulate_cmd->add_option("--n-test", simulate.task.n_test, "Test samples per class")->capture_default_str();
  simulate_cmd->add_option("--directions", simulate.directions, "Number of drift directions")->capture_default_str();
  simulate_cmd->add_option("--severities", simulate.severities, "Severity levels (0..5)")
      ->delimiter(',')
      ->capture_default_str();
  simulate_cmd->add_option("--drift", simulate.shift.mean_drift, "Mean drift per severity unit")->capture_default_str();
  simulate_cmd->add_option("--noise-gain", simulate.shift.noise_gain, "Noise multiplier per severity unit")
      ->capture_default_str();
  simulate_cmd->add_option("--tilt", simulate.shift.label_marginal_tilt, "Label-marginal tilt in [0, 1)")
      ->capture_default_str();
  simulate_cmd->add_option("--lr", simulate.trainer.lr, "Trainer learning rate")->capture_default_str();
  simulate_cmd->add_option("--epochs", simulate.trainer.epochs, "Trainer epochs")->capture_default_str();
  simulate_cmd->add_option("--export", simulate.export_dir, "Write NPY files and manifest.json to DIR");

  auto* phi = app.add_subcommand("phi-study", "Monte-Carlo 99% interval of the softrun criterion per K");
  add_common(phi, phi_opts, false);
  phi->add_option("--k", phi_cli.k, "Class counts")->delimiter(',')->capture_default_str();
  phi->add_option("--n-models", phi_cli.n_models, "Simulated models per K")->capture_default_str();
  phi->add_option("--n-samples", phi_cli.n_samples, "Logit rows per simulated model")->capture_default_str();
  phi->add_option("--bound", phi_cli.bound, "Logits drawn uniformly in [-bound, bound]")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kIoError;
  }

  auto log = make_logger(err);
  try {
    if (*score) return cmd_score(score_opts, score_in, out, *log);
    if (*bench) return cmd_bench(bench_opts, bench_in, out, *log);
    if (*regress) return cmd_regress(regress_opts, out);
    if (*simulate_cmd) {
      simulate.task.seed = sim_opts.seed;
      return cmd_simulate(sim_opts, simulate, out, *log);
    }
    if (*phi) return cmd_phi_study(phi_opts, phi_cli, out);
  } catch (const Error& e) {
    err << "mano: error: " << e.what() << '\n';
    return is_io_error(e.code()) ? kIoError : kDomainError;
  } catch (const std::exception& e) {
    err << "mano: error: " << e.what() << '\n';
    return kDomainError;
  }
  return kOk;
}

}  // namespace mano::cli
