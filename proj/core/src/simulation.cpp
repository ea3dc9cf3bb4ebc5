#include "qmeval/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmeval/errors.hpp"
#include "qmeval/metrics.hpp"
#include "qmeval/rng.hpp"

namespace qmeval {

namespace {

// Stream tags keep the generators of different simulation parts apart.
constexpr std::uint64_t kPairsStream = 0x70616972;      // "pair"
constexpr std::uint64_t kLatentStream = 0x6c61746e;     // "latn"
constexpr std::uint64_t kRaterStream = 0x72617472;      // "ratr"
constexpr std::uint64_t kPredictionStream = 0x70726564; // "pred"

std::string padded_id(char prefix, std::size_t value, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t c = count > 0 ? count - 1 : 0; c >= 10; c /= 10) ++width;
  std::string digits = std::to_string(value);
  return std::string(1, prefix) + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

}  // namespace

JoinedEvaluation simulate_correlated_pairs(std::size_t n, double target_pcc, std::uint64_t seed) {
  if (!(std::fabs(target_pcc) < 1.0)) throw std::invalid_argument("target correlation must satisfy |r| < 1");
  if (n < 3) throw std::invalid_argument("simulation needs at least 3 points");
  auto rng = RandomStream::child(seed, kPairsStream);
  const double residual = std::sqrt(1.0 - target_pcc * target_pcc);
  std::vector<EvaluationItem> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    items.push_back(EvaluationItem{padded_id('p', i, n), z1, 0.0, target_pcc * z1 + residual * z2});
  }
  return JoinedEvaluation(std::move(items), Granularity::file);
}

std::vector<std::size_t> equal_count_bounds(std::size_t n, std::size_t groups) {
  if (groups == 0) throw std::invalid_argument("need at least one group");
  std::vector<std::size_t> bounds(groups + 1);
  for (std::size_t k = 0; k <= groups; ++k) bounds[k] = (k * n + groups - 1) / groups;
  return bounds;
}

RegionTable restricted_range_regions(const JoinedEvaluation& eval, std::size_t regions,
                                     const std::vector<Metric>& metrics, KendallVariant variant) {
  if (regions == 0 || regions > eval.size()) throw std::invalid_argument("invalid region count");
  RegionTable table;
  table.metrics = metrics;
  const auto evaluate = [&](std::span<const double> mos, std::span<const double> ci,
                            std::span<const double> pred) {
    std::vector<std::optional<MetricValue>> out;
    for (const auto m : metrics) {
      if (mos.size() < 2) {
        out.emplace_back();
        continue;
      }
      try {
        out.emplace_back(evaluate_metric(m, mos, ci, pred, variant));
      } catch (const DegenerateStatistic&) {
        out.emplace_back();
      }
    }
    return out;
  };
  table.full = evaluate(eval.mos(), eval.ci_halfwidths(), eval.predictions());

  std::vector<std::size_t> order(eval.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto mos = eval.mos();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mos[a] < mos[b]; });
  const auto bounds = equal_count_bounds(eval.size(), regions);
  std::vector<double> m, c, p;
  for (std::size_t k = 0; k < regions; ++k) {
    m.clear();
    c.clear();
    p.clear();
    for (std::size_t r = bounds[k]; r < bounds[k + 1]; ++r) {
      m.push_back(mos[order[r]]);
      c.push_back(eval.ci_halfwidths()[order[r]]);
      p.push_back(eval.predictions()[order[r]]);
    }
    RegionMetrics region{k, m.size(), m.empty() ? 0.0 : m.front(), m.empty() ? 0.0 : m.back(), evaluate(m, c, p)};
    table.regions.push_back(std::move(region));
  }
  return table;
}

RegionTable simulate_restricted_range_regions(std::size_t n, double target_pcc, std::size_t regions,
                                              std::uint64_t seed, const std::vector<Metric>& metrics) {
  return restricted_range_regions(simulate_correlated_pairs(n, target_pcc, seed), regions, metrics);
}

SimulatedRatings simulate_rater_dataset(const RaterSimulationConfig& config) {
  config.scale.validate();
  if (config.n_stimuli == 0) throw std::invalid_argument("need at least one stimulus");
  if (config.n_raters < 2) throw std::invalid_argument("need at least two raters");
  if (config.files_per_condition == 0) throw std::invalid_argument("files_per_condition must be positive");
  if (!(config.rater_bias_sd >= 0.0) || !(config.rater_noise_sd >= 0.0)) {
    throw std::invalid_argument("standard deviations must be non-negative");
  }
  const auto& scale = config.scale;
  const std::size_t n_conditions = (config.n_stimuli + config.files_per_condition - 1) / config.files_per_condition;

  std::vector<std::string> stimulus_ids;
  std::vector<double> latent;
  std::vector<double> rater_bias;
  auto latent_rng = RandomStream::child(config.seed, kLatentStream);
  for (std::size_t s = 0; s < config.n_stimuli; ++s) {
    stimulus_ids.push_back(padded_id('s', s, config.n_stimuli));
    latent.push_back(scale.min + (scale.max - scale.min) * latent_rng.uniform());
  }

  std::vector<Rating> entries;
  entries.reserve(config.n_stimuli * config.n_raters);
  for (std::size_t r = 0; r < config.n_raters; ++r) {
    auto rng = RandomStream::child(config.seed, kRaterStream, r);
    const double bias = config.rater_bias_sd * rng.normal();
    rater_bias.push_back(bias);
    const auto rater_id = padded_id('r', r, config.n_raters);
    for (std::size_t s = 0; s < config.n_stimuli; ++s) {
      double vote = latent[s] + bias + config.rater_noise_sd * rng.normal();
      if (scale.kind == ScaleKind::discrete) vote = std::round(vote);
      vote = std::clamp(vote, scale.min, scale.max);
      entries.push_back(Rating{padded_id('c', s / config.files_per_condition, n_conditions), stimulus_ids[s],
                               rater_id, vote});
    }
  }
  return SimulatedRatings{RatingsDataset(std::move(entries), scale), std::move(stimulus_ids), std::move(latent),
                          std::move(rater_bias)};
}

PredictionTable simulate_predictions(const SimulatedRatings& ratings, double noise_sd, std::uint64_t seed,
                                     std::string model_name) {
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise standard deviation must be non-negative");
  auto rng = RandomStream::child(seed, kPredictionStream);
  std::map<std::string, double> rows;
  for (std::size_t s = 0; s < ratings.latent.size(); ++s) {
    rows.emplace(ratings.stimulus_ids[s], ratings.latent[s] + noise_sd * rng.normal());
  }
  return PredictionTable(std::move(model_name), Granularity::file, std::move(rows));
}

}  // namespace qmeval
