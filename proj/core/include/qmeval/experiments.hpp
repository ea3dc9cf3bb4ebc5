#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmeval/correlation.hpp"
#include "qmeval/dataset.hpp"
#include "qmeval/evaluation.hpp"
#include "qmeval/mos.hpp"

namespace qmeval {

enum class ExperimentKind { sample_size, rater_sampling, restricted_range, synthetic_correlation };
enum class Region { bad, excellent };
enum class RaterPool {
  global,        // draw r raters from the whole panel; each stimulus keeps the votes of those raters
  per_stimulus,  // draw r of each stimulus's own raters
};

std::string_view to_string(ExperimentKind k);
std::string_view to_string(Region r);
std::string_view to_string(RaterPool p);
ExperimentKind parse_experiment_kind(std::string_view text);
Region parse_region(std::string_view text);
RaterPool parse_rater_pool(std::string_view text);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sample_size;
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  // Sample sizes or rater counts. Empty selects the protocol default:
  // sample_size_grid(N, grid_points, min_size) or linear_grid(12, 20, 8).
  std::vector<std::size_t> grid;
  std::size_t grid_points = 20;
  std::size_t min_size = 10;
  std::vector<Metric> metrics{std::begin(kAllMetrics), std::end(kAllMetrics)};
  KendallVariant kendall = KendallVariant::tau_b;

  // Restricted range.
  std::size_t split = 2;
  std::vector<Region> regions{Region::bad, Region::excellent};

  // Rater sampling: MOS and CIs are recomputed from the drawn panel.
  CiPolicy ci;
  Granularity granularity = Granularity::file;
  RaterPool rater_pool = RaterPool::global;

  // Synthetic correlation.
  std::size_t synthetic_n = 1000;
  double target_pcc = 0.8;

  // Throws InputError on an invalid combination.
  void validate() const;
};

// Protocol defaults: 1000 replicates, or 100 for the synthetic study.
ExperimentConfig default_config(ExperimentKind kind);

struct ExecutionOptions {
  std::size_t threads = 0;  // 0 = hardware concurrency; never affects results
};

struct Summary {
  std::size_t valid = 0;
  std::size_t missing = 0;
  std::optional<double> mean;
  std::optional<double> std_dev;  // sample standard deviation, 0 for one value
  std::optional<double> p5;       // linear-interpolation percentiles
  std::optional<double> p95;
  // Against the population value, when there is one.
  std::optional<double> abs_mean_deviation;  // |mean - rho|
  std::optional<double> mean_abs_deviation;  // mean |value - rho|
  std::optional<double> p5_deviation;        // |p5 - rho|
  std::optional<double> p95_deviation;       // |p95 - rho|
};

// Linear interpolation between order statistics (q in [0, 1]).
double percentile_sorted(std::span<const double> sorted, double q);

// Summary over the non-missing values.
Summary summarize(std::span<const std::optional<double>> values, std::optional<double> population);

struct MetricSeries {
  Metric metric = Metric::pcc;
  std::optional<double> population;
  std::vector<std::optional<double>> values;  // one per replicate; nullopt = missing
  Summary summary;
};

struct GridPoint {
  std::string label;  // size as text, or region name
  std::size_t size = 0;
  std::vector<MetricSeries> series;  // in config.metrics order

  const MetricSeries* find(Metric metric) const;
  bool all_missing() const;
};

struct ExperimentReport {
  ExperimentConfig config;  // resolved (grid filled in)
  std::size_t population_size = 0;
  std::vector<GridPoint> points;
  std::vector<std::string> warnings;
};

// Log-spaced sizes from min_n to population_n - 2, truncated to integers
// and de-duplicated.
std::vector<std::size_t> sample_size_grid(std::size_t population_n, std::size_t points = 20, std::size_t min_n = 10);

// Linearly spaced integers from lo to hi, rounded and de-duplicated.
std::vector<std::size_t> linear_grid(std::size_t lo, std::size_t hi, std::size_t points);

// For each grid size and replicate, draws that many items without
// replacement and recomputes every metric. CI half-widths stay those of the
// full dataset. Population values use all items.
ExperimentReport run_sample_size_experiment(const JoinedEvaluation& eval, ExperimentConfig config,
                                            const ExecutionOptions& exec = {});

// For each rater count and replicate, draws a rater panel, recomputes MOS and
// CIs from those raters only and evaluates the metrics. No population
// comparison is made; the spread across replicates is the result.
ExperimentReport run_rater_sampling_experiment(const RatingsDataset& dataset, const PredictionTable& predictions,
                                               ExperimentConfig config, const ExecutionOptions& exec = {});

// Ranks items by MOS (ties by id), splits them into `split` equal-count
// groups and evaluates the lowest (bad) and highest (excellent) group
// against the full-dataset values.
ExperimentReport run_restricted_range_experiment(const JoinedEvaluation& eval, ExperimentConfig config);

// Simulated population (simulate_correlated_pairs) followed by the sample-size protocol.
ExperimentReport run_synthetic_correlation_experiment(ExperimentConfig config, const ExecutionOptions& exec = {});

}  // namespace qmeval
