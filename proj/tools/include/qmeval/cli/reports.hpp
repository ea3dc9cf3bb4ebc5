#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmeval/cli/manifest.hpp"
#include "qmeval/correlation.hpp"
#include "qmeval/dataset.hpp"
#include "qmeval/experiments.hpp"
#include "qmeval/mos.hpp"
#include "qmeval/significance.hpp"

namespace qmeval::cli {

using Json = nlohmann::ordered_json;

Json to_json(const CiPolicy& policy);
CiPolicy ci_policy_from_json(const nlohmann::json& j, CiPolicy base = {});

Json to_json(const std::optional<Scale>& scale);
std::optional<Scale> scale_from_json(const nlohmann::json& j);

Json metric_names(const std::vector<Metric>& metrics);
std::vector<Metric> metrics_from_json(const nlohmann::json& j);

// Experiment settings, including the resolved grid. Keys absent from `j`
// keep the values of `base`. Throws InputError on bad values.
Json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig base);

Json to_json(const Summary& summary);
Json report_to_json(const ExperimentReport& report, const RunManifest& manifest);

// Long format: grid,metric,replicate,value with NA for missing replicates.
void write_replicates_csv(std::ostream& out, const ExperimentReport& report);

// Named SVG documents for an experiment report. Plots without any finite
// value are left out and named in `skipped`.
std::vector<std::pair<std::string, std::string>> experiment_plots(const ExperimentReport& report,
                                                                  std::vector<std::string>& skipped);

struct ModelMetrics {
  std::string model;
  std::string path;
  std::size_t n_items = 0;
  std::size_t without_prediction = 0;
  std::size_t unknown_ids = 0;
  struct Row {
    Metric metric = Metric::pcc;
    std::optional<MetricValue> value;
    std::string error;  // set when value is empty
  };
  std::vector<Row> rows;
};

Json metrics_report_to_json(const std::vector<ModelMetrics>& models, Granularity granularity,
                            const RunManifest& manifest);
// model,metric,value,n_items,n_pairs_used
void write_metrics_csv(std::ostream& out, const std::vector<ModelMetrics>& models);

// Square matrix of corrected p-values; untested cells are empty.
void write_significance_csv(std::ostream& out, const SignificanceMatrix& matrix);
Json significance_report_to_json(const SignificanceReport& report, PairingUnit pairing, const RunManifest& manifest);

}  // namespace qmeval::cli
