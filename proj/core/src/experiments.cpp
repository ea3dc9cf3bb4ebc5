#include "qmeval/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmeval/errors.hpp"
#include "qmeval/metrics.hpp"
#include "qmeval/parallel.hpp"
#include "qmeval/rng.hpp"
#include "qmeval/simulation.hpp"

namespace qmeval {

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sample_size: return "sample-size";
    case ExperimentKind::rater_sampling: return "rater-sampling";
    case ExperimentKind::restricted_range: return "restricted-range";
    case ExperimentKind::synthetic_correlation: return "synthetic";
  }
  return "?";
}

std::string_view to_string(Region r) { return r == Region::bad ? "bad" : "excellent"; }

std::string_view to_string(RaterPool p) { return p == RaterPool::global ? "global" : "per-stimulus"; }

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (const auto k : {ExperimentKind::sample_size, ExperimentKind::rater_sampling, ExperimentKind::restricted_range,
                       ExperimentKind::synthetic_correlation}) {
    if (to_string(k) == text) return k;
  }
  throw InputError("unknown experiment '" + std::string(text) +
                   "' (expected sample-size|rater-sampling|restricted-range|synthetic)");
}

Region parse_region(std::string_view text) {
  if (text == "bad") return Region::bad;
  if (text == "excellent") return Region::excellent;
  throw InputError("unknown region '" + std::string(text) + "' (expected bad|excellent)");
}

RaterPool parse_rater_pool(std::string_view text) {
  if (text == "global") return RaterPool::global;
  if (text == "per-stimulus") return RaterPool::per_stimulus;
  throw InputError("unknown rater pool '" + std::string(text) + "' (expected global|per-stimulus)");
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw InputError("replicates must be at least 1");
  if (metrics.empty()) throw InputError("no metrics selected");
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t j = i + 1; j < metrics.size(); ++j) {
      if (metrics[i] == metrics[j]) throw InputError("metric listed twice");
    }
  }
  for (const auto g : grid) {
    if (g < 2) throw InputError("grid sizes must be at least 2");
  }
  if (kind == ExperimentKind::restricted_range) {
    if (split != 2 && split != 4) throw InputError("split must be 2 or 4");
    if (regions.empty()) throw InputError("no region selected");
  }
  if (kind == ExperimentKind::synthetic_correlation) {
    if (!(std::fabs(target_pcc) < 1.0)) throw InputError("target correlation must satisfy |r| < 1");
    if (synthetic_n < 3) throw InputError("synthetic population needs at least 3 points");
  }
  if (grid_points < 2) throw InputError("grid needs at least 2 points");
  try {
    ci.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig config;
  config.kind = kind;
  if (kind == ExperimentKind::synthetic_correlation) config.replicates = 100;
  if (kind == ExperimentKind::restricted_range) config.replicates = 1;
  return config;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::span<const std::optional<double>> values, std::optional<double> population) {
  Summary s;
  std::vector<double> valid;
  for (const auto& v : values) {
    if (v) valid.push_back(*v);
  }
  s.valid = valid.size();
  s.missing = values.size() - valid.size();
  if (valid.empty()) return s;

  // Offsets from the first value keep a constant series exact.
  const auto n = static_cast<double>(valid.size());
  const double origin = valid.front();
  double shift_sum = 0.0;
  for (const double v : valid) shift_sum += v - origin;
  const double shift = shift_sum / n;
  const double mean = origin + shift;
  double ss = 0.0;
  for (const double v : valid) ss += (v - origin - shift) * (v - origin - shift);
  s.mean = mean;
  s.std_dev = valid.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(valid.begin(), valid.end());
  s.p5 = percentile_sorted(valid, 0.05);
  s.p95 = percentile_sorted(valid, 0.95);
  if (population) {
    const double rho = *population;
    s.abs_mean_deviation = std::fabs(mean - rho);
    double abs_sum = 0.0;
    for (const double v : valid) abs_sum += std::fabs(v - rho);
    s.mean_abs_deviation = abs_sum / n;
    s.p5_deviation = std::fabs(*s.p5 - rho);
    s.p95_deviation = std::fabs(*s.p95 - rho);
  }
  return s;
}

const MetricSeries* GridPoint::find(Metric metric) const {
  for (const auto& s : series) {
    if (s.metric == metric) return &s;
  }
  return nullptr;
}

bool GridPoint::all_missing() const {
  return std::all_of(series.begin(), series.end(), [](const MetricSeries& s) { return s.summary.valid == 0; });
}

std::vector<std::size_t> sample_size_grid(std::size_t population_n, std::size_t points, std::size_t min_n) {
  if (points < 2) throw InputError("grid needs at least 2 points");
  if (min_n < 2) throw InputError("minimum sample size must be at least 2");
  if (population_n < min_n + 2) {
    throw InputError("population of " + std::to_string(population_n) + " is too small for a grid starting at " +
                     std::to_string(min_n));
  }
  const std::size_t top = population_n - 2;
  const double lo = std::log(static_cast<double>(min_n));
  const double hi = std::log(static_cast<double>(top));
  std::vector<std::size_t> grid;
  for (std::size_t k = 0; k < points; ++k) {
    std::size_t value = 0;
    if (k == 0) {
      value = min_n;
    } else if (k + 1 == points) {
      value = top;
    } else {
      const double x = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
      value = static_cast<std::size_t>(std::floor(x + 1e-9));
    }
    if (grid.empty() || grid.back() != value) grid.push_back(value);
  }
  return grid;
}

std::vector<std::size_t> linear_grid(std::size_t lo, std::size_t hi, std::size_t points) {
  if (points < 1 || hi < lo) throw InputError("invalid linear grid");
  std::vector<std::size_t> grid;
  for (std::size_t k = 0; k < points; ++k) {
    const double x = points == 1 ? static_cast<double>(lo)
                                 : static_cast<double>(lo) + static_cast<double>(k) * static_cast<double>(hi - lo) /
                                                                 static_cast<double>(points - 1);
    const auto value = static_cast<std::size_t>(std::llround(x));
    if (grid.empty() || grid.back() != value) grid.push_back(value);
  }
  return grid;
}

namespace {

// Tag mixed into the rater-sampling stream key so it never coincides with
// the sample-size streams for the same seed.
constexpr std::uint64_t kRaterDrawTag = 0x7261746572000000ULL;

std::vector<std::optional<double>> evaluate_all(const ExperimentConfig& config, std::span<const double> mos,
                                                std::span<const double> ci, std::span<const double> pred) {
  std::vector<std::optional<double>> out;
  out.reserve(config.metrics.size());
  for (const auto m : config.metrics) {
    out.push_back(mos.size() < 2 ? std::nullopt : try_metric(m, mos, ci, pred, config.kendall));
  }
  return out;
}

// values[point][metric][replicate] -> report points.
void assemble(ExperimentReport& report, const std::vector<std::vector<std::vector<std::optional<double>>>>& values,
              const std::vector<std::optional<double>>& population, const std::vector<std::string>& labels,
              const std::vector<std::size_t>& sizes) {
  const auto& metrics = report.config.metrics;
  for (std::size_t g = 0; g < values.size(); ++g) {
    GridPoint point{labels[g], sizes[g], {}};
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      MetricSeries series{metrics[m], population[m], values[g][m], {}};
      series.summary = summarize(series.values, series.population);
      point.series.push_back(std::move(series));
    }
    if (point.all_missing()) report.warnings.push_back("grid point " + point.label + ": every replicate is missing");
    report.points.push_back(std::move(point));
  }
}

ExperimentReport sample_size_core(const JoinedEvaluation& eval, ExperimentConfig config,
                                  const ExecutionOptions& exec) {
  const std::size_t n_items = eval.size();
  if (config.grid.empty()) config.grid = sample_size_grid(n_items, config.grid_points, config.min_size);
  config.validate();
  for (const auto g : config.grid) {
    if (g > n_items) {
      throw InputError("grid size " + std::to_string(g) + " exceeds the population of " + std::to_string(n_items));
    }
  }
  std::sort(config.grid.begin(), config.grid.end());
  config.grid.erase(std::unique(config.grid.begin(), config.grid.end()), config.grid.end());

  ExperimentReport report;
  report.config = config;
  report.population_size = n_items;
  const auto population = evaluate_all(config, eval.mos(), eval.ci_halfwidths(), eval.predictions());
  for (std::size_t m = 0; m < config.metrics.size(); ++m) {
    if (!population[m]) {
      report.warnings.push_back(std::string(to_string(config.metrics[m])) +
                                " is undefined on the full dataset; deviations are not reported");
    }
  }

  const std::size_t points = config.grid.size();
  const std::size_t reps = config.replicates;
  const std::size_t n_metrics = config.metrics.size();
  std::vector<std::vector<std::vector<std::optional<double>>>> values(
      points, std::vector<std::vector<std::optional<double>>>(n_metrics, std::vector<std::optional<double>>(reps)));

  parallel_for(points * reps, exec.threads, [&](std::size_t task) {
    const std::size_t g = task / reps;
    const std::size_t r = task % reps;
    const std::size_t size = config.grid[g];
    auto rng = RandomStream::child(config.seed, size, r);
    const auto picked = sample_without_replacement(rng, n_items, size);
    std::vector<double> mos(size), ci(size), pred(size);
    for (std::size_t i = 0; i < size; ++i) {
      mos[i] = eval.mos()[picked[i]];
      ci[i] = eval.ci_halfwidths()[picked[i]];
      pred[i] = eval.predictions()[picked[i]];
    }
    const auto result = evaluate_all(config, mos, ci, pred);
    for (std::size_t m = 0; m < n_metrics; ++m) values[g][m][r] = result[m];
  });

  std::vector<std::string> labels;
  for (const auto g : config.grid) labels.push_back(std::to_string(g));
  assemble(report, values, population, labels, config.grid);
  return report;
}

}  // namespace

ExperimentReport run_sample_size_experiment(const JoinedEvaluation& eval, ExperimentConfig config,
                                            const ExecutionOptions& exec) {
  config.kind = ExperimentKind::sample_size;
  return sample_size_core(eval, std::move(config), exec);
}

ExperimentReport run_synthetic_correlation_experiment(ExperimentConfig config, const ExecutionOptions& exec) {
  config.kind = ExperimentKind::synthetic_correlation;
  config.validate();
  const auto eval = simulate_correlated_pairs(config.synthetic_n, config.target_pcc, config.seed);
  return sample_size_core(eval, std::move(config), exec);
}

ExperimentReport run_restricted_range_experiment(const JoinedEvaluation& eval, ExperimentConfig config) {
  config.kind = ExperimentKind::restricted_range;
  config.replicates = 1;
  config.grid.clear();
  config.validate();
  const std::size_t n = eval.size();
  if (n < 2 * config.split) {
    throw InputError("restricted range with a " + std::to_string(config.split) + "-split needs at least " +
                     std::to_string(2 * config.split) + " items");
  }

  ExperimentReport report;
  report.config = config;
  report.population_size = n;
  const auto population = evaluate_all(config, eval.mos(), eval.ci_halfwidths(), eval.predictions());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto all_mos = eval.mos();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return all_mos[a] < all_mos[b]; });
  const auto bounds = equal_count_bounds(n, config.split);

  std::vector<std::vector<std::vector<std::optional<double>>>> values;
  std::vector<std::string> labels;
  std::vector<std::size_t> sizes;
  for (const auto region : config.regions) {
    const std::size_t group = region == Region::bad ? 0 : config.split - 1;
    std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(bounds[group]),
                                     order.begin() + static_cast<std::ptrdiff_t>(bounds[group + 1]));
    std::sort(members.begin(), members.end());
    std::vector<double> mos, ci, pred;
    for (const auto i : members) {
      mos.push_back(eval.mos()[i]);
      ci.push_back(eval.ci_halfwidths()[i]);
      pred.push_back(eval.predictions()[i]);
    }
    const auto result = evaluate_all(config, mos, ci, pred);
    std::vector<std::vector<std::optional<double>>> per_metric;
    for (const auto& v : result) per_metric.push_back({v});
    values.push_back(std::move(per_metric));
    labels.emplace_back(to_string(region));
    sizes.push_back(members.size());
  }
  assemble(report, values, population, labels, sizes);
  return report;
}

ExperimentReport run_rater_sampling_experiment(const RatingsDataset& dataset, const PredictionTable& predictions,
                                               ExperimentConfig config, const ExecutionOptions& exec) {
  config.kind = ExperimentKind::rater_sampling;
  if (config.grid.empty()) config.grid = linear_grid(12, 20, 8);
  config.validate();
  if (predictions.granularity() != config.granularity) {
    throw InputError("granularity mismatch: experiment evaluates per " + std::string(to_string(config.granularity)) +
                     " but predictions are per " + std::string(to_string(predictions.granularity())));
  }
  std::sort(config.grid.begin(), config.grid.end());
  config.grid.erase(std::unique(config.grid.begin(), config.grid.end()), config.grid.end());

  const auto& raters = dataset.raters();
  const auto& stimuli = dataset.stimuli();
  // votes[s] = (rater index, score) for stimulus s.
  std::vector<std::vector<std::pair<std::size_t, double>>> votes(stimuli.size());
  std::size_t smallest_panel = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < stimuli.size(); ++s) {
    for (const auto& r : dataset.votes(stimuli[s])) {
      const auto idx = static_cast<std::size_t>(std::lower_bound(raters.begin(), raters.end(), r.rater_id) -
                                                raters.begin());
      votes[s].emplace_back(idx, r.score);
    }
    smallest_panel = std::min(smallest_panel, votes[s].size());
  }
  const std::size_t pool = config.rater_pool == RaterPool::global ? raters.size() : smallest_panel;
  for (const auto g : config.grid) {
    if (g > pool) {
      throw InputError("rater count " + std::to_string(g) + " exceeds the available rater pool of " +
                       std::to_string(pool));
    }
  }

  // Output units (stimuli or conditions) that have a prediction.
  struct Unit {
    std::vector<std::size_t> stimuli;
    double prediction;
  };
  std::vector<Unit> units;
  ExperimentReport report;
  std::size_t without_prediction = 0;
  if (config.granularity == Granularity::file) {
    for (std::size_t s = 0; s < stimuli.size(); ++s) {
      if (const auto p = predictions.find(stimuli[s].id)) {
        units.push_back(Unit{{s}, *p});
      } else {
        ++without_prediction;
      }
    }
  } else {
    for (const auto& c : dataset.conditions()) {
      if (const auto p = predictions.find(c.id)) {
        units.push_back(Unit{c.stimuli, *p});
      } else {
        ++without_prediction;
      }
    }
  }
  if (units.size() < 2) throw InputError("fewer than 2 rated ids have a prediction");
  if (without_prediction > 0) {
    report.warnings.push_back(std::to_string(without_prediction) + " rated ids have no prediction and were dropped");
  }

  const std::size_t max_votes = config.rater_pool == RaterPool::global ? raters.size() : pool;
  std::size_t max_condition_votes = max_votes;
  for (const auto& u : units) max_condition_votes = std::max(max_condition_votes, u.stimuli.size() * max_votes);
  std::vector<double> t_table(max_condition_votes + 1, 0.0);
  for (std::size_t v = 2; v < t_table.size(); ++v) t_table[v] = t_quantile(v, config.ci);

  report.config = config;
  report.population_size = units.size();
  const std::size_t points = config.grid.size();
  const std::size_t reps = config.replicates;
  const std::size_t n_metrics = config.metrics.size();
  std::vector<std::vector<std::vector<std::optional<double>>>> values(
      points, std::vector<std::vector<std::optional<double>>>(n_metrics, std::vector<std::optional<double>>(reps)));

  parallel_for(points * reps, exec.threads, [&](std::size_t task) {
    const std::size_t g = task / reps;
    const std::size_t rep = task % reps;
    const std::size_t panel = config.grid[g];
    auto rng = RandomStream::child(config.seed, kRaterDrawTag + panel, rep);

    std::vector<char> chosen;
    if (config.rater_pool == RaterPool::global) {
      chosen.assign(raters.size(), 0);
      for (const auto i : sample_without_replacement(rng, raters.size(), panel)) chosen[i] = 1;
    }
    std::vector<std::optional<VoteSummary>> per_stimulus(stimuli.size());
    std::vector<double> scores;
    const auto summarize_stimulus = [&](std::size_t s) {
      if (per_stimulus[s]) return;
      scores.clear();
      if (config.rater_pool == RaterPool::global) {
        for (const auto& [rater, score] : votes[s]) {
          if (chosen[rater]) scores.push_back(score);
        }
      } else {
        for (const auto i : sample_without_replacement(rng, votes[s].size(), panel)) scores.push_back(votes[s][i].second);
      }
      if (scores.size() >= 2) per_stimulus[s] = summarize_votes(scores);
    };

    std::vector<double> mos, ci, pred;
    std::vector<VoteSummary> files;
    for (const auto& unit : units) {
      files.clear();
      for (const auto s : unit.stimuli) {
        summarize_stimulus(s);
        if (per_stimulus[s]) files.push_back(*per_stimulus[s]);
      }
      if (files.empty()) continue;
      const VoteSummary summary = files.size() == 1 ? files.front() : pool_files(files);
      mos.push_back(summary.mean);
      ci.push_back(ci_halfwidth(summary.std_dev, summary.votes, t_table[summary.votes], config.ci));
      pred.push_back(unit.prediction);
    }
    const auto result = evaluate_all(config, mos, ci, pred);
    for (std::size_t m = 0; m < n_metrics; ++m) values[g][m][rep] = result[m];
  });

  std::vector<std::string> labels;
  for (const auto g : config.grid) labels.push_back(std::to_string(g));
  const std::vector<std::optional<double>> no_population(n_metrics);
  assemble(report, values, no_population, labels, config.grid);
  return report;
}

}  // namespace qmeval
