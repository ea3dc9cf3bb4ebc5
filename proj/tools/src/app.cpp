#include "qmeval/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "qmeval/cci.hpp"
#include "qmeval/cli/manifest.hpp"
#include "qmeval/cli/reports.hpp"
#include "qmeval/cli/svg.hpp"
#include "qmeval/csv.hpp"
#include "qmeval/errors.hpp"
#include "qmeval/evaluation.hpp"
#include "qmeval/experiments.hpp"
#include "qmeval/metrics.hpp"
#include "qmeval/simulation.hpp"

namespace qmeval::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string out_dir = ".";
  std::string format = "json";
  std::optional<std::string> ci_divisor;
  std::optional<std::string> ci_df;
  std::optional<double> scale_min;
  std::optional<double> scale_max;
  std::optional<std::string> scale_kind;
};

struct EvaluateArgs {
  std::string ratings;
  std::vector<std::string> predictions;
  std::string granularity = "file";
  std::string kendall = "tau-b";
  std::vector<std::string> metrics;
};

struct ExperimentArgs {
  std::optional<std::string> kind;
  std::optional<std::string> config;
  std::optional<std::string> ratings;
  std::optional<std::string> predictions;
  std::optional<std::string> granularity;
  std::optional<std::size_t> replicates;
  std::vector<std::size_t> grid;
  std::optional<std::size_t> grid_points;
  std::optional<std::size_t> min_size;
  std::vector<std::string> metrics;
  std::optional<std::string> kendall;
  std::optional<std::size_t> split;
  std::vector<std::string> regions;
  std::optional<std::string> rater_pool;
  std::optional<std::size_t> n;
  std::optional<double> target_pcc;
  bool plot = false;
};

struct SlopeArgs {
  std::string ratings;
  std::string predictions;
  std::string granularity = "file";
};

struct SignificanceArgs {
  std::string ratings;
  double alpha = 0.05;
  std::string correction = "holm";
  std::string pairing = "auto";
  std::vector<std::string> anchors;
  std::vector<double> percentiles{5.0, 50.0, 95.0};
  bool all_pairs = false;
};

struct SimulateArgs {
  std::string kind = "pairs";
  std::size_t n = 1000;
  double target_pcc = 0.8;
  std::size_t regions = 3;
  std::size_t stimuli = 100;
  std::size_t raters = 30;
  double bias_sd = 0.3;
  double noise_sd = 0.7;
  double prediction_noise = 0.2;
  std::size_t files_per_condition = 1;
  bool plot = false;
};

class Runner {
 public:
  Runner(const Globals& globals, std::ostream& out, std::ostream& err) : g_(globals), out_(out), err_(err) {}

  int evaluate(const EvaluateArgs& a);
  int experiment(const ExperimentArgs& a);
  int slope_plot(const SlopeArgs& a);
  int significance(const SignificanceArgs& a);
  int simulate(const SimulateArgs& a);

 private:
  std::optional<Scale> scale_override() const;
  CiPolicy ci_policy(CiPolicy base = {}) const;
  RatingsDataset load_ratings_file(const std::string& path, std::optional<Scale> scale) const;
  PredictionTable load_predictions_file(const std::string& spec, Granularity granularity, std::string* name_out,
                                        std::string* path_out) const;
  RunManifest manifest(const std::string& subcommand, Json config, std::uint64_t seed) const;
  void add_input(RunManifest& m, const std::string& role, const std::string& path) const;
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
  void warn(const std::string& message) { err_ << "warning: " << message << '\n'; }

  const Globals& g_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string rethrow_location(const std::string& path, const InputError& e) {
  std::string where = path;
  if (e.line()) where += ":" + std::to_string(*e.line());
  if (e.column()) where += ":" + std::to_string(*e.column());
  return where + ": " + e.detail();
}

// "name=path" or a bare path, whose stem names the model.
std::pair<std::string, std::string> split_model_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq != std::string::npos && eq > 0 && spec.substr(0, eq).find('/') == std::string::npos) {
    return {spec.substr(0, eq), spec.substr(eq + 1)};
  }
  return {fs::path(spec).stem().string(), spec};
}

std::optional<Scale> Runner::scale_override() const {
  if (!g_.scale_min && !g_.scale_max && !g_.scale_kind) return std::nullopt;
  if (!g_.scale_min || !g_.scale_max) throw InputError("--scale-min and --scale-max must be given together");
  Scale s{*g_.scale_min, *g_.scale_max, g_.scale_kind ? parse_scale_kind(*g_.scale_kind) : ScaleKind::discrete};
  s.validate();
  return s;
}

CiPolicy Runner::ci_policy(CiPolicy base) const {
  if (g_.ci_divisor) base.divisor = parse_ci_divisor(*g_.ci_divisor);
  if (g_.ci_df) base.df = parse_df_convention(*g_.ci_df);
  return base;
}

RatingsDataset Runner::load_ratings_file(const std::string& path, std::optional<Scale> scale) const {
  try {
    return load_ratings(path, RatingsLoadOptions{scale});
  } catch (const InputError& e) {
    throw InputError(rethrow_location(path, e));
  }
}

PredictionTable Runner::load_predictions_file(const std::string& spec, Granularity granularity,
                                              std::string* name_out, std::string* path_out) const {
  const auto [name, path] = split_model_spec(spec);
  if (name_out) *name_out = name;
  if (path_out) *path_out = path;
  try {
    return load_predictions(path, name, granularity);
  } catch (const InputError& e) {
    throw InputError(rethrow_location(path, e));
  }
}

RunManifest Runner::manifest(const std::string& subcommand, Json config, std::uint64_t seed) const {
  RunManifest m;
  m.version = tool_version();
  m.subcommand = subcommand;
  m.config = std::move(config);
  m.seed = seed;
  m.timestamp = run_timestamp();
  return m;
}

void Runner::add_input(RunManifest& m, const std::string& role, const std::string& path) const {
  m.inputs.push_back(InputDigest{role, path, sha256_file(path)});
}

void Runner::write(const std::string& name, const std::string& content) {
  const fs::path dir(g_.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path target = dir / name;
  std::ofstream file(target, std::ios::binary);
  if (!file) throw InputError("cannot write '" + target.string() + "'");
  file << content;
  if (!file) throw InputError("failed writing '" + target.string() + "'");
  out_ << "wrote " << target.string() << '\n';
}

std::string join_ids_message(const JoinResult& joined, const std::string& model) {
  std::ostringstream s;
  s << model << ": " << joined.dropped() << " ids dropped (" << joined.without_prediction.size()
    << " rated ids without a prediction, " << joined.unknown_ids.size() << " prediction ids not rated)";
  return s.str();
}

int Runner::evaluate(const EvaluateArgs& a) {
  const auto granularity = parse_granularity(a.granularity);
  const auto kendall = parse_kendall_variant(a.kendall);
  std::vector<Metric> metrics(std::begin(kAllMetrics), std::end(kAllMetrics));
  if (!a.metrics.empty()) {
    metrics.clear();
    for (const auto& m : a.metrics) metrics.push_back(parse_metric(m));
  }
  if (g_.format != "json" && g_.format != "csv") throw InputError("--format must be json or csv");
  const auto scale = scale_override();
  const auto policy = ci_policy();
  const auto dataset = load_ratings_file(a.ratings, scale);
  const auto table = mos_table(dataset, granularity, policy);

  Json config = {{"granularity", to_string(granularity)}, {"kendall", to_string(kendall)},
                 {"metrics", metric_names(metrics)},      {"ci", to_json(policy)},
                 {"scale", to_json(scale)},               {"format", g_.format}};
  auto m = manifest("evaluate", std::move(config), g_.seed.value_or(0));
  add_input(m, "ratings", a.ratings);

  std::vector<ModelMetrics> models;
  std::set<std::string> names;
  bool degenerate = false;
  for (const auto& spec : a.predictions) {
    ModelMetrics model;
    const auto preds = load_predictions_file(spec, granularity, &model.model, &model.path);
    if (!names.insert(model.model).second) throw InputError("model name '" + model.model + "' given twice");
    add_input(m, "predictions", model.path);
    JoinResult joined = [&] {
      try {
        return join(table, preds, dataset.scale());
      } catch (const InputError& e) {
        throw InputError(model.path + ": " + e.what());
      }
    }();
    if (joined.dropped() > 0) warn(join_ids_message(joined, model.model));
    model.n_items = joined.evaluation.size();
    model.without_prediction = joined.without_prediction.size();
    model.unknown_ids = joined.unknown_ids.size();
    for (const auto metric : metrics) {
      ModelMetrics::Row row{metric, std::nullopt, {}};
      try {
        row.value = evaluate_metric(metric, joined.evaluation, kendall);
      } catch (const DegenerateStatistic& e) {
        row.error = e.what();
        degenerate = true;
        err_ << "error: " << model.model << " " << to_string(metric) << ": " << e.what() << '\n';
      }
      model.rows.push_back(std::move(row));
    }
    models.push_back(std::move(model));
  }

  std::ostringstream mos_csv;
  write_mos_csv(mos_csv, table);
  write("mos.csv", mos_csv.str());
  if (g_.format == "json") {
    write_json("metrics.json", metrics_report_to_json(models, granularity, m));
  } else {
    std::ostringstream csv_text;
    write_metrics_csv(csv_text, models);
    write("metrics.csv", csv_text.str());
    write_json("manifest.json", to_json(m));
  }
  for (const auto& model : models) {
    for (const auto& row : model.rows) {
      out_ << model.model << '\t' << to_string(row.metric) << '\t'
           << (row.value ? csv::format_double(row.value->value) : std::string("NA")) << '\t' << model.n_items << '\t'
           << (row.value ? row.value->n_pairs_used : 0) << '\n';
    }
  }
  return degenerate ? kExitDegenerate : kExitOk;
}

int Runner::experiment(const ExperimentArgs& a) {
  ExperimentConfig config;
  std::optional<Scale> scale;
  std::optional<std::string> ratings = a.ratings;
  std::optional<std::string> predictions = a.predictions;
  std::optional<std::string> config_path = a.config;

  nlohmann::json loaded;
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw InputError("cannot open '" + *config_path + "'");
    try {
      loaded = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(*config_path + ": " + e.what());
    }
    // A prior report: take the resolved settings and inputs from its manifest.
    if (loaded.is_object() && loaded.contains("manifest")) {
      const auto prior = manifest_from_json(loaded.at("manifest"));
      loaded = prior.config;
      for (const auto& input : prior.inputs) {
        if (input.role == "ratings" && !ratings) ratings = input.path;
        if (input.role == "predictions" && !predictions) predictions = input.path;
      }
    }
    if (!loaded.is_object()) throw InputError(*config_path + ": config must be a JSON object");
  }

  ExperimentKind kind{};
  if (a.kind) {
    kind = parse_experiment_kind(*a.kind);
  } else if (loaded.contains("experiment")) {
    kind = parse_experiment_kind(loaded.at("experiment").get<std::string>());
  } else {
    throw InputError("--experiment is required");
  }
  config = default_config(kind);
  if (!loaded.is_null()) {
    config = experiment_config_from_json(loaded, config);
    if (loaded.contains("scale")) scale = scale_from_json(loaded.at("scale"));
  }
  config.kind = kind;
  if (g_.seed) config.seed = *g_.seed;
  if (a.replicates) config.replicates = *a.replicates;
  if (!a.grid.empty()) config.grid = a.grid;
  if (a.grid_points) config.grid_points = *a.grid_points;
  if (a.min_size) config.min_size = *a.min_size;
  if (!a.metrics.empty()) {
    config.metrics.clear();
    for (const auto& m : a.metrics) config.metrics.push_back(parse_metric(m));
  }
  if (a.kendall) config.kendall = parse_kendall_variant(*a.kendall);
  if (a.split) config.split = *a.split;
  if (!a.regions.empty()) {
    config.regions.clear();
    for (const auto& r : a.regions) config.regions.push_back(parse_region(r));
  }
  if (a.granularity) config.granularity = parse_granularity(*a.granularity);
  if (a.rater_pool) config.rater_pool = parse_rater_pool(*a.rater_pool);
  if (a.n) config.synthetic_n = *a.n;
  if (a.target_pcc) config.target_pcc = *a.target_pcc;
  config.ci = ci_policy(config.ci);
  if (const auto override_scale = scale_override()) scale = override_scale;
  config.validate();

  const ExecutionOptions exec{g_.threads};
  std::vector<std::pair<std::string, std::string>> inputs;
  ExperimentReport report;
  if (kind == ExperimentKind::synthetic_correlation) {
    report = run_synthetic_correlation_experiment(config, exec);
  } else {
    if (!ratings || !predictions) throw InputError("--ratings and --predictions are required for this experiment");
    const auto dataset = load_ratings_file(*ratings, scale);
    const auto preds = load_predictions_file(*predictions, config.granularity, nullptr, nullptr);
    inputs.emplace_back("ratings", *ratings);
    inputs.emplace_back("predictions", *predictions);
    if (kind == ExperimentKind::rater_sampling) {
      report = run_rater_sampling_experiment(dataset, preds, config, exec);
    } else {
      const auto table = mos_table(dataset, config.granularity, config.ci);
      auto joined = join(table, preds, dataset.scale());
      if (joined.dropped() > 0) warn(join_ids_message(joined, preds.model_name()));
      report = kind == ExperimentKind::sample_size ? run_sample_size_experiment(joined.evaluation, config, exec)
                                                   : run_restricted_range_experiment(joined.evaluation, config);
    }
  }
  for (const auto& w : report.warnings) warn(w);

  Json resolved = to_json(report.config);
  resolved["scale"] = to_json(scale);
  auto m = manifest("experiment", std::move(resolved), report.config.seed);
  for (const auto& [role, path] : inputs) add_input(m, role, path);

  write_json("report.json", report_to_json(report, m));
  std::ostringstream replicates;
  write_replicates_csv(replicates, report);
  write("replicates.csv", replicates.str());
  if (a.plot) {
    std::vector<std::string> skipped;
    for (const auto& [name, svg] : experiment_plots(report, skipped)) write(name, svg);
    for (const auto& name : skipped) warn("no plottable data for " + name + "; plot not written");
  }

  for (const auto& p : report.points) {
    for (const auto& s : p.series) {
      out_ << p.label << '\t' << to_string(s.metric) << "\tvalid=" << s.summary.valid
           << "\tmean=" << (s.summary.mean ? csv::format_double(*s.summary.mean) : "NA")
           << "\tstd=" << (s.summary.std_dev ? csv::format_double(*s.summary.std_dev) : "NA") << '\n';
    }
  }
  return kExitOk;
}

int Runner::slope_plot(const SlopeArgs& a) {
  const auto granularity = parse_granularity(a.granularity);
  const auto scale = scale_override();
  const auto policy = ci_policy();
  const auto dataset = load_ratings_file(a.ratings, scale);
  std::string model;
  std::string path;
  const auto preds = load_predictions_file(a.predictions, granularity, &model, &path);
  const auto table = mos_table(dataset, granularity, policy);
  const auto joined = join(table, preds, dataset.scale());
  if (joined.dropped() > 0) warn(join_ids_message(joined, model));
  const auto set = build_constrained_set(joined.evaluation);
  const auto points = slope_decomposition(set);

  Json config = {{"granularity", to_string(granularity)}, {"ci", to_json(policy)}, {"scale", to_json(scale)}};
  auto m = manifest("slope-plot", std::move(config), g_.seed.value_or(0));
  add_input(m, "ratings", a.ratings);
  add_input(m, "predictions", path);

  std::ostringstream csv_text;
  write_slope_csv(csv_text, points);
  write("slope.csv", csv_text.str());
  ScatterPlot plot{"Constrained pairs: " + model, "MOS distance", "slope", "concordant", "discordant", {}};
  std::size_t concordant = 0;
  for (const auto& p : points) {
    plot.points.push_back(ScatterPoint{p.mos_distance, p.slope, p.concordant});
    concordant += p.concordant ? 1 : 0;
  }
  if (const auto svg = render(plot)) write("slope.svg", *svg);
  write_json("manifest.json", to_json(m));
  out_ << "pairs=" << points.size() << "\tconcordant=" << concordant
       << "\tdiscordant=" << points.size() - concordant << "\tCCI=" << csv::format_double(cci(set).value) << '\n';
  return kExitOk;
}

int Runner::significance(const SignificanceArgs& a) {
  const auto scale = scale_override();
  const auto dataset = load_ratings_file(a.ratings, scale);
  NeighborhoodOptions options;
  options.alpha = a.alpha;
  options.correction = parse_correction(a.correction);
  options.pairing = parse_pairing_unit(a.pairing);
  options.anchors = a.anchors;
  options.percentiles = a.percentiles;
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");

  const auto report = a.all_pairs ? significance_matrix(dataset, options) : neighborhood_analysis(dataset, options);
  for (const auto& w : report.warnings) warn(w);
  for (const auto& u : report.unpaired) warn("conditions " + u.a + " and " + u.b + " not tested: " + u.reason);

  Json config = {{"alpha", a.alpha},
                 {"correction", to_string(options.correction)},
                 {"pairing", to_string(options.pairing)},
                 {"all_pairs", a.all_pairs},
                 {"anchors", a.anchors},
                 {"percentiles", a.percentiles},
                 {"scale", to_json(scale)}};
  auto m = manifest("significance", std::move(config), g_.seed.value_or(0));
  add_input(m, "ratings", a.ratings);

  std::ostringstream matrix_csv;
  write_significance_csv(matrix_csv, report.matrix);
  write("significance_matrix.csv", matrix_csv.str());
  write_json("neighborhoods.json", significance_report_to_json(report, options.pairing, m));
  for (const auto& n : report.neighborhoods) {
    out_ << n.anchor << '\t';
    for (std::size_t i = 0; i < n.indistinguishable.size(); ++i) out_ << (i ? "," : "") << n.indistinguishable[i];
    out_ << '\n';
  }
  return kExitOk;
}

int Runner::simulate(const SimulateArgs& a) {
  const std::uint64_t seed = g_.seed.value_or(0);
  Json config = {{"kind", a.kind}};
  if (a.kind == "pairs") {
    config["n"] = a.n;
    config["target_pcc"] = a.target_pcc;
    const auto eval = simulate_correlated_pairs(a.n, a.target_pcc, seed);
    std::ostringstream text;
    text << "id,mos,prediction\n";
    for (const auto& item : eval.items()) {
      text << item.id << ',' << csv::format_double(item.mos) << ',' << csv::format_double(item.prediction) << '\n';
    }
    write("pairs.csv", text.str());
    out_ << "PCC=" << csv::format_double(pcc(eval.mos(), eval.predictions()).value) << '\n';
  } else if (a.kind == "regions") {
    config["n"] = a.n;
    config["target_pcc"] = a.target_pcc;
    config["regions"] = a.regions;
    const auto table = simulate_restricted_range_regions(a.n, a.target_pcc, a.regions, seed);
    const auto value = [](const std::optional<MetricValue>& v) -> Json {
      if (!v) return nullptr;
      return v->value;
    };
    Json full = Json::object();
    for (std::size_t k = 0; k < table.metrics.size(); ++k) full[std::string(to_string(table.metrics[k]))] = value(table.full[k]);
    Json regions = Json::array();
    BarChart bars{"Metrics per equal-count region", "value", {"all"}, {}, {}};
    for (const auto metric : table.metrics) bars.series.emplace_back(to_string(metric));
    bars.values.emplace_back();
    for (const auto& v : table.full) bars.values.back().push_back(v ? std::optional<double>(v->value) : std::nullopt);
    for (const auto& r : table.regions) {
      Json metrics = Json::object();
      bars.groups.push_back("region " + std::to_string(r.index + 1));
      bars.values.emplace_back();
      for (std::size_t k = 0; k < table.metrics.size(); ++k) {
        metrics[std::string(to_string(table.metrics[k]))] = value(r.metrics[k]);
        bars.values.back().push_back(r.metrics[k] ? std::optional<double>(r.metrics[k]->value) : std::nullopt);
      }
      regions.push_back({{"index", r.index}, {"size", r.size}, {"mos_min", r.mos_min}, {"mos_max", r.mos_max},
                         {"metrics", std::move(metrics)}});
      out_ << "region " << r.index + 1 << "\tsize=" << r.size;
      for (std::size_t k = 0; k < table.metrics.size(); ++k) {
        out_ << '\t' << to_string(table.metrics[k]) << '='
             << (r.metrics[k] ? csv::format_double(r.metrics[k]->value) : std::string("NA"));
      }
      out_ << '\n';
    }
    auto m = manifest("simulate", config, seed);
    write_json("regions.json", {{"manifest", to_json(m)}, {"full", std::move(full)}, {"regions", std::move(regions)}});
    if (a.plot) {
      if (const auto svg = render(bars)) {
        write("regions.svg", *svg);
      } else {
        warn("no plottable data for regions.svg; plot not written");
      }
    }
    return kExitOk;
  } else if (a.kind == "ratings") {
    RaterSimulationConfig sim;
    sim.n_stimuli = a.stimuli;
    sim.n_raters = a.raters;
    sim.rater_bias_sd = a.bias_sd;
    sim.rater_noise_sd = a.noise_sd;
    sim.files_per_condition = a.files_per_condition;
    sim.seed = seed;
    if (const auto s = scale_override()) sim.scale = *s;
    config["stimuli"] = a.stimuli;
    config["raters"] = a.raters;
    config["bias_sd"] = a.bias_sd;
    config["noise_sd"] = a.noise_sd;
    config["prediction_noise"] = a.prediction_noise;
    config["files_per_condition"] = a.files_per_condition;
    config["scale"] = to_json(std::optional<Scale>(sim.scale));
    const auto ratings = simulate_rater_dataset(sim);
    const auto preds = simulate_predictions(ratings, a.prediction_noise, seed);
    std::ostringstream ratings_text, preds_text, latent_text;
    write_ratings(ratings_text, ratings.dataset);
    write_predictions(preds_text, preds);
    latent_text << "stimulus_id,latent\n";
    for (std::size_t s = 0; s < ratings.latent.size(); ++s) {
      latent_text << ratings.stimulus_ids[s] << ',' << csv::format_double(ratings.latent[s]) << '\n';
    }
    write("ratings.csv", ratings_text.str());
    write("predictions.csv", preds_text.str());
    write("latent.csv", latent_text.str());
  } else {
    throw InputError("unknown simulation '" + a.kind + "' (expected pairs|regions|ratings)");
  }
  write_json("manifest.json", to_json(manifest("simulate", std::move(config), seed)));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate quality-prediction models against subjective ratings", "qmeval"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", tool_version());

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (default 0)");
  app.add_option("--threads", g.threads, "Worker threads, 0 = all hardware threads");
  app.add_option("--out-dir", g.out_dir, "Directory for report files")->capture_default_str();
  app.add_option("--format", g.format, "Metrics report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--ci-divisor", g.ci_divisor, "CI divisor: standard (sqrt(M)) or linear (M)")
      ->check(CLI::IsMember({"standard", "linear"}));
  app.add_option("--ci-df", g.ci_df, "Degrees of freedom for the t quantile")->check(CLI::IsMember({"n", "n-1"}));
  app.add_option("--scale-min", g.scale_min, "Rating scale minimum (overrides the file header)");
  app.add_option("--scale-max", g.scale_max, "Rating scale maximum (overrides the file header)");
  app.add_option("--scale-kind", g.scale_kind, "discrete or continuous")
      ->check(CLI::IsMember({"discrete", "continuous"}));

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compute PCC, SRCC, KTAU and CCI per model");
  evaluate->add_option("--ratings", ev.ratings, "Ratings CSV")->required();
  evaluate->add_option("--predictions", ev.predictions, "Prediction CSV, optionally name=path")->required();
  evaluate->add_option("--granularity", ev.granularity, "file or condition")->check(CLI::IsMember({"file", "condition"}));
  evaluate->add_option("--kendall", ev.kendall, "tau-b or tau-a")->check(CLI::IsMember({"tau-b", "tau-a"}));
  evaluate->add_option("--metrics", ev.metrics, "Subset of PCC,SRCC,KTAU,CCI")->delimiter(',');

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run a robustness experiment");
  experiment->add_option("--experiment,-k", ex.kind, "sample-size, rater-sampling, restricted-range or synthetic")
      ->check(CLI::IsMember({"sample-size", "rater-sampling", "restricted-range", "synthetic"}));
  experiment->add_option("--config", ex.config, "Config JSON or a previous report.json");
  experiment->add_option("--ratings", ex.ratings, "Ratings CSV");
  experiment->add_option("--predictions", ex.predictions, "Prediction CSV");
  experiment->add_option("--granularity", ex.granularity, "file or condition")
      ->check(CLI::IsMember({"file", "condition"}));
  experiment->add_option("--replicates", ex.replicates, "Replicates per grid point");
  experiment->add_option("--grid", ex.grid, "Explicit sample sizes or rater counts")->delimiter(',');
  experiment->add_option("--grid-points", ex.grid_points, "Points of the log-spaced sample-size grid");
  experiment->add_option("--min-size", ex.min_size, "Smallest sample size of the log grid");
  experiment->add_option("--metrics", ex.metrics, "Subset of PCC,SRCC,KTAU,CCI")->delimiter(',');
  experiment->add_option("--kendall", ex.kendall, "tau-b or tau-a")->check(CLI::IsMember({"tau-b", "tau-a"}));
  experiment->add_option("--split", ex.split, "Restricted-range split, 2 or 4");
  experiment->add_option("--region", ex.regions, "bad and/or excellent")->delimiter(',');
  experiment->add_option("--rater-pool", ex.rater_pool, "global or per-stimulus")
      ->check(CLI::IsMember({"global", "per-stimulus"}));
  experiment->add_option("--n", ex.n, "Synthetic population size");
  experiment->add_option("--target-pcc", ex.target_pcc, "Synthetic population correlation");
  experiment->add_flag("--plot", ex.plot, "Also write SVG plots");

  SlopeArgs sl;
  auto* slope = app.add_subcommand("slope-plot", "Slope versus MOS distance for the constrained pairs");
  slope->add_option("--ratings", sl.ratings, "Ratings CSV")->required();
  slope->add_option("--predictions", sl.predictions, "Prediction CSV")->required();
  slope->add_option("--granularity", sl.granularity, "file or condition")->check(CLI::IsMember({"file", "condition"}));

  SignificanceArgs sg;
  auto* significance = app.add_subcommand("significance", "Pairwise Wilcoxon tests between conditions");
  significance->add_option("--ratings", sg.ratings, "Ratings CSV")->required();
  significance->add_option("--alpha", sg.alpha, "Significance level");
  significance->add_option("--correction", sg.correction, "holm, bonferroni or none")
      ->check(CLI::IsMember({"holm", "bonferroni", "none"}));
  significance->add_option("--pairing", sg.pairing, "auto, votes or file-mos")
      ->check(CLI::IsMember({"auto", "votes", "file-mos"}));
  significance->add_option("--anchor", sg.anchors, "Anchor condition ids (default: percentile anchors)")
      ->delimiter(',');
  significance->add_option("--percentiles", sg.percentiles, "Anchor percentiles of condition MOS")->delimiter(',');
  significance->add_flag("--all-pairs", sg.all_pairs, "Test every pair of conditions");

  SimulateArgs sm;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic data");
  simulate->add_option("--kind", sm.kind, "pairs, regions or ratings")
      ->check(CLI::IsMember({"pairs", "regions", "ratings"}));
  simulate->add_option("--n", sm.n, "Number of simulated pairs");
  simulate->add_option("--target-pcc", sm.target_pcc, "Population correlation of simulated pairs");
  simulate->add_option("--regions", sm.regions, "Equal-count regions along MOS");
  simulate->add_option("--stimuli", sm.stimuli, "Simulated stimuli");
  simulate->add_option("--raters", sm.raters, "Simulated raters");
  simulate->add_option("--bias-sd", sm.bias_sd, "Per-rater bias standard deviation");
  simulate->add_option("--noise-sd", sm.noise_sd, "Per-vote noise standard deviation");
  simulate->add_option("--prediction-noise", sm.prediction_noise, "Noise of the simulated predictor");
  simulate->add_option("--files-per-condition", sm.files_per_condition, "Stimuli sharing one condition");
  simulate->add_flag("--plot", sm.plot, "Also write an SVG plot (regions)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  Runner runner(g, out, err);
  try {
    if (*evaluate) return runner.evaluate(ev);
    if (*experiment) return runner.experiment(ex);
    if (*slope) return runner.slope_plot(sl);
    if (*significance) return runner.significance(sg);
    if (*simulate) return runner.simulate(sm);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const DegenerateStatistic& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace qmeval::cli
