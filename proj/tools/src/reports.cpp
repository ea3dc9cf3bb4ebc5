#include "qmeval/cli/reports.hpp"

#include <cmath>
#include <ostream>

#include "qmeval/cli/svg.hpp"
#include "qmeval/csv.hpp"
#include "qmeval/errors.hpp"

namespace qmeval::cli {

namespace {

Json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

template <typename T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string get_text(const nlohmann::json& j, const char* key) { return get<std::string>(j, key); }

}  // namespace

Json to_json(const CiPolicy& policy) {
  return {{"divisor", to_string(policy.divisor)},
          {"df", to_string(policy.df)},
          {"large_sample_cutoff", policy.large_sample_cutoff},
          {"z_value", policy.z_value}};
}

CiPolicy ci_policy_from_json(const nlohmann::json& j, CiPolicy base) {
  if (!j.is_object()) throw InputError("config key 'ci' must be an object");
  if (j.contains("divisor")) base.divisor = parse_ci_divisor(get_text(j, "divisor"));
  if (j.contains("df")) base.df = parse_df_convention(get_text(j, "df"));
  if (j.contains("large_sample_cutoff")) base.large_sample_cutoff = get<std::size_t>(j, "large_sample_cutoff");
  if (j.contains("z_value")) base.z_value = get<double>(j, "z_value");
  return base;
}

Json to_json(const std::optional<Scale>& scale) {
  if (!scale) return nullptr;
  return {{"min", scale->min}, {"max", scale->max}, {"kind", to_string(scale->kind)}};
}

std::optional<Scale> scale_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  Scale s{get<double>(j, "min"), get<double>(j, "max"), parse_scale_kind(get_text(j, "kind"))};
  s.validate();
  return s;
}

Json metric_names(const std::vector<Metric>& metrics) {
  Json out = Json::array();
  for (const auto m : metrics) out.push_back(to_string(m));
  return out;
}

std::vector<Metric> metrics_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("config key 'metrics' must be a list");
  std::vector<Metric> out;
  for (const auto& m : j) {
    if (!m.is_string()) throw InputError("config key 'metrics' must list metric names");
    out.push_back(parse_metric(m.get<std::string>()));
  }
  return out;
}

Json to_json(const ExperimentConfig& c) {
  Json regions = Json::array();
  for (const auto r : c.regions) regions.push_back(to_string(r));
  return {{"experiment", to_string(c.kind)},
          {"replicates", c.replicates},
          {"seed", c.seed},
          {"grid", c.grid},
          {"grid_points", c.grid_points},
          {"min_size", c.min_size},
          {"metrics", metric_names(c.metrics)},
          {"kendall", to_string(c.kendall)},
          {"split", c.split},
          {"regions", regions},
          {"granularity", to_string(c.granularity)},
          {"rater_pool", to_string(c.rater_pool)},
          {"n", c.synthetic_n},
          {"target_pcc", c.target_pcc},
          {"ci", to_json(c.ci)}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  if (!j.is_object()) throw InputError("experiment config must be a JSON object");
  if (j.contains("experiment")) c.kind = parse_experiment_kind(get_text(j, "experiment"));
  if (j.contains("replicates")) c.replicates = get<std::size_t>(j, "replicates");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("grid")) c.grid = get<std::vector<std::size_t>>(j, "grid");
  if (j.contains("grid_points")) c.grid_points = get<std::size_t>(j, "grid_points");
  if (j.contains("min_size")) c.min_size = get<std::size_t>(j, "min_size");
  if (j.contains("metrics")) c.metrics = metrics_from_json(j.at("metrics"));
  if (j.contains("kendall")) c.kendall = parse_kendall_variant(get_text(j, "kendall"));
  if (j.contains("split")) c.split = get<std::size_t>(j, "split");
  if (j.contains("regions")) {
    c.regions.clear();
    for (const auto& r : get<std::vector<std::string>>(j, "regions")) c.regions.push_back(parse_region(r));
  }
  if (j.contains("granularity")) c.granularity = parse_granularity(get_text(j, "granularity"));
  if (j.contains("rater_pool")) c.rater_pool = parse_rater_pool(get_text(j, "rater_pool"));
  if (j.contains("n")) c.synthetic_n = get<std::size_t>(j, "n");
  if (j.contains("target_pcc")) c.target_pcc = get<double>(j, "target_pcc");
  if (j.contains("ci")) c.ci = ci_policy_from_json(j.at("ci"), c.ci);
  return c;
}

Json to_json(const Summary& s) {
  return {{"valid", s.valid},
          {"missing", s.missing},
          {"mean", optional_number(s.mean)},
          {"std", optional_number(s.std_dev)},
          {"p5", optional_number(s.p5)},
          {"p95", optional_number(s.p95)},
          {"abs_mean_deviation", optional_number(s.abs_mean_deviation)},
          {"mean_abs_deviation", optional_number(s.mean_abs_deviation)},
          {"p5_deviation", optional_number(s.p5_deviation)},
          {"p95_deviation", optional_number(s.p95_deviation)}};
}

Json report_to_json(const ExperimentReport& report, const RunManifest& manifest) {
  Json points = Json::array();
  for (const auto& p : report.points) {
    Json metrics = Json::array();
    for (const auto& s : p.series) {
      Json entry = {{"metric", to_string(s.metric)}, {"population", optional_number(s.population)}};
      entry.update(to_json(s.summary));
      metrics.push_back(std::move(entry));
    }
    points.push_back({{"label", p.label}, {"size", p.size}, {"metrics", std::move(metrics)}});
  }
  return {{"manifest", to_json(manifest)},
          {"experiment", to_string(report.config.kind)},
          {"population_size", report.population_size},
          {"warnings", report.warnings},
          {"points", std::move(points)}};
}

void write_replicates_csv(std::ostream& out, const ExperimentReport& report) {
  out << "grid,metric,replicate,value\n";
  for (const auto& p : report.points) {
    for (const auto& s : p.series) {
      for (std::size_t r = 0; r < s.values.size(); ++r) {
        out << csv::escape(p.label) << ',' << to_string(s.metric) << ',' << r << ','
            << (s.values[r] ? csv::format_double(*s.values[r]) : "NA") << '\n';
      }
    }
  }
}

std::vector<std::pair<std::string, std::string>> experiment_plots(const ExperimentReport& report,
                                                                  std::vector<std::string>& skipped) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& metrics = report.config.metrics;
  const auto add = [&](const std::string& name, std::optional<std::string> svg) {
    if (svg) {
      out.emplace_back(name, std::move(*svg));
    } else {
      skipped.push_back(name);
    }
  };
  const auto curve = [&](Metric m, const char* suffix, bool dashed, auto field) {
    LineSeries series{std::string(to_string(m)) + suffix, {}, {}, dashed};
    for (const auto& p : report.points) {
      const auto* s = p.find(m);
      series.x.push_back(static_cast<double>(p.size));
      series.y.push_back(s ? field(s->summary) : std::nullopt);
    }
    return series;
  };

  const bool sized = report.config.kind != ExperimentKind::restricted_range;
  const std::string x_label = report.config.kind == ExperimentKind::rater_sampling ? "raters" : "sample size";
  if (sized) {
    const bool has_population = report.config.kind != ExperimentKind::rater_sampling;
    if (has_population) {
      LineChart deviation{"Deviation of the sample mean from the population value", x_label, "|mean - population|",
                          true, {}};
      LineChart percentile{"Percentile deviation from the population value", x_label, "|percentile - population|",
                           true, {}};
      for (const auto m : metrics) {
        deviation.series.push_back(curve(m, "", false, [](const Summary& s) { return s.abs_mean_deviation; }));
        percentile.series.push_back(curve(m, " p5", false, [](const Summary& s) { return s.p5_deviation; }));
        percentile.series.push_back(curve(m, " p95", true, [](const Summary& s) { return s.p95_deviation; }));
      }
      add("deviation.svg", render(deviation));
      add("percentiles.svg", render(percentile));
    }
    LineChart spread{"Standard deviation across replicates", x_label, "std", has_population, {}};
    for (const auto m : metrics) spread.series.push_back(curve(m, "", false, [](const Summary& s) { return s.std_dev; }));
    add("std.svg", render(spread));
  } else {
    BarChart bars{"Deviation within restricted ranges", "|region value - full value|", {}, {}, {}};
    for (const auto m : metrics) bars.series.emplace_back(to_string(m));
    for (const auto& p : report.points) {
      bars.groups.push_back(p.label);
      std::vector<std::optional<double>> row;
      for (const auto m : metrics) {
        const auto* s = p.find(m);
        row.push_back(s ? s->summary.abs_mean_deviation : std::nullopt);
      }
      bars.values.push_back(std::move(row));
    }
    add("regions.svg", render(bars));
  }
  return out;
}

Json metrics_report_to_json(const std::vector<ModelMetrics>& models, Granularity granularity,
                            const RunManifest& manifest) {
  Json list = Json::array();
  for (const auto& m : models) {
    Json rows = Json::array();
    for (const auto& r : m.rows) {
      Json row = {{"metric", to_string(r.metric)}};
      if (r.value) {
        row["value"] = r.value->value;
        row["n_items"] = r.value->n_items;
        row["n_pairs_used"] = r.value->n_pairs_used;
      } else {
        row["value"] = nullptr;
        row["error"] = r.error;
      }
      rows.push_back(std::move(row));
    }
    list.push_back({{"model", m.model},
                    {"predictions", m.path},
                    {"n_items", m.n_items},
                    {"dropped_without_prediction", m.without_prediction},
                    {"unknown_prediction_ids", m.unknown_ids},
                    {"metrics", std::move(rows)}});
  }
  return {{"manifest", to_json(manifest)}, {"granularity", to_string(granularity)}, {"models", std::move(list)}};
}

void write_metrics_csv(std::ostream& out, const std::vector<ModelMetrics>& models) {
  out << "model,metric,value,n_items,n_pairs_used\n";
  for (const auto& m : models) {
    for (const auto& r : m.rows) {
      out << csv::escape(m.model) << ',' << to_string(r.metric) << ',';
      if (r.value) {
        out << csv::format_double(r.value->value) << ',' << r.value->n_items << ',' << r.value->n_pairs_used;
      } else {
        out << "NA," << m.n_items << ",0";
      }
      out << '\n';
    }
  }
}

void write_significance_csv(std::ostream& out, const SignificanceMatrix& matrix) {
  out << "condition_id";
  for (const auto& id : matrix.condition_ids) out << ',' << csv::escape(id);
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << csv::escape(matrix.condition_ids[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      out << ',';
      if (matrix.tested(i, j)) out << csv::format_double(matrix.p(i, j));
    }
    out << '\n';
  }
}

Json significance_report_to_json(const SignificanceReport& report, PairingUnit pairing, const RunManifest& manifest) {
  Json neighborhoods = Json::object();
  Json anchors = Json::array();
  for (const auto& n : report.neighborhoods) {
    neighborhoods[n.anchor] = n.indistinguishable;
    anchors.push_back({{"id", n.anchor},
                       {"percentile", optional_number(n.percentile)},
                       {"mos", n.anchor_mos},
                       {"indistinguishable", n.indistinguishable}});
  }
  Json unpaired = Json::array();
  for (const auto& u : report.unpaired) unpaired.push_back({{"a", u.a}, {"b", u.b}, {"reason", u.reason}});
  return {{"manifest", to_json(manifest)},
          {"alpha", report.matrix.alpha},
          {"correction", to_string(report.matrix.correction)},
          {"pairing", to_string(pairing)},
          {"conditions", report.matrix.condition_ids},
          {"neighborhoods", std::move(neighborhoods)},
          {"anchors", std::move(anchors)},
          {"unpaired", std::move(unpaired)},
          {"warnings", report.warnings}};
}

}  // namespace qmeval::cli
