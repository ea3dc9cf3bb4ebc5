#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmeval/correlation.hpp"
#include "qmeval/dataset.hpp"
#include "qmeval/evaluation.hpp"

namespace qmeval {

// n draws from a unit-variance bivariate normal with correlation
// target_pcc (y = z1, y_hat = r z1 + sqrt(1 - r^2) z2). CI half-widths are
// zero so every pair with distinct MOS enters the constrained set. Ids are
// zero-padded so id order equals draw order.
JoinedEvaluation simulate_correlated_pairs(std::size_t n, double target_pcc, std::uint64_t seed);

// Bounds of `groups` equal-count blocks over n ranked items: block k covers
// ranks [bounds[k], bounds[k+1]) with bounds[k] = ceil(k n / groups).
std::vector<std::size_t> equal_count_bounds(std::size_t n, std::size_t groups);

struct RegionMetrics {
  std::size_t index = 0;
  std::size_t size = 0;
  double mos_min = 0.0;
  double mos_max = 0.0;
  std::vector<std::optional<MetricValue>> metrics;  // nullopt when degenerate
};

struct RegionTable {
  std::vector<Metric> metrics;
  std::vector<std::optional<MetricValue>> full;
  std::vector<RegionMetrics> regions;
};

// Splits an evaluation into `regions` equal-count blocks along MOS (ties by
// id) and evaluates each metric per block and on the whole set.
RegionTable restricted_range_regions(const JoinedEvaluation& eval, std::size_t regions,
                                     const std::vector<Metric>& metrics = {std::begin(kAllMetrics),
                                                                           std::end(kAllMetrics)},
                                     KendallVariant variant = KendallVariant::tau_b);

RegionTable simulate_restricted_range_regions(std::size_t n, double target_pcc, std::size_t regions,
                                              std::uint64_t seed,
                                              const std::vector<Metric>& metrics = {std::begin(kAllMetrics),
                                                                                    std::end(kAllMetrics)});

struct RaterSimulationConfig {
  std::size_t n_stimuli = 100;
  std::size_t n_raters = 30;
  double rater_bias_sd = 0.0;
  double rater_noise_sd = 0.0;
  Scale scale = Scale::acr5();
  std::size_t files_per_condition = 1;
  std::uint64_t seed = 0;
};

struct SimulatedRatings {
  RatingsDataset dataset;
  std::vector<std::string> stimulus_ids;  // aligned with latent
  std::vector<double> latent;
  std::vector<double> rater_bias;  // one per rater, aligned with dataset.raters()
};

// vote = clamp(round_if_discrete(latent + bias_rater + noise)); latent is
// uniform over the scale, each rater's bias is drawn once.
SimulatedRatings simulate_rater_dataset(const RaterSimulationConfig& config);

// y_hat = latent + N(0, noise_sd) per stimulus.
PredictionTable simulate_predictions(const SimulatedRatings& ratings, double noise_sd, std::uint64_t seed,
                                     std::string model_name = "simulated");

}  // namespace qmeval
