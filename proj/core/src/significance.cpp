#include "qmeval/significance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "qmeval/correlation.hpp"
#include "qmeval/errors.hpp"
#include "qmeval/mos.hpp"

namespace qmeval {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("signed-rank test needs paired samples of equal length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult result;
  result.n_nonzero = diffs.size();
  if (diffs.empty()) {
    result.degenerate = true;
    return result;
  }

  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::fabs(d); });
  const auto ranks = average_ranks(magnitudes);

  // Average ranks are multiples of 1/2, so doubled ranks are exact integers.
  std::vector<std::size_t> doubled(ranks.size());
  std::size_t positive_sum = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
    total += doubled[i];
    if (diffs[i] > 0.0) positive_sum += doubled[i];
  }
  result.statistic = static_cast<double>(positive_sum) / 2.0;
  const std::size_t n = diffs.size();

  if (n <= kWilcoxonExactLimit) {
    // counts[s] = number of sign assignments whose positive doubled-rank sum is s.
    std::vector<double> counts(total + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (const auto r : doubled) {
      for (std::size_t s = reach + 1; s-- > 0;) {
        if (counts[s] != 0.0) counts[s + r] += counts[s];
      }
      reach += r;
    }
    double lower = 0.0, upper = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      if (s <= positive_sum) lower += counts[s];
      if (s >= positive_sum) upper += counts[s];
    }
    const double all = std::ldexp(1.0, static_cast<int>(n));
    result.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    result.exact = true;
    return result;
  }

  const auto nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  std::vector<double> sorted = magnitudes;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::fabs(result.statistic - mean) - 0.5) / std::sqrt(variance);
  result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  result.exact = false;
  return result;
}

std::string_view to_string(Correction c) {
  switch (c) {
    case Correction::holm: return "holm";
    case Correction::bonferroni: return "bonferroni";
    case Correction::none: return "none";
  }
  return "?";
}

Correction parse_correction(std::string_view text) {
  if (text == "holm") return Correction::holm;
  if (text == "bonferroni") return Correction::bonferroni;
  if (text == "none") return Correction::none;
  throw InputError("unknown correction '" + std::string(text) + "' (expected holm|bonferroni|none)");
}

std::vector<double> holm_correction(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double candidate = std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]);
    running = std::max(running, candidate);
    adjusted[order[k]] = running;
  }
  return adjusted;
}

std::vector<double> bonferroni_correction(std::span<const double> p_values) {
  std::vector<double> adjusted(p_values.size());
  const auto m = static_cast<double>(p_values.size());
  std::transform(p_values.begin(), p_values.end(), adjusted.begin(), [m](double p) { return std::min(1.0, m * p); });
  return adjusted;
}

std::vector<double> correct(std::span<const double> p_values, Correction method) {
  switch (method) {
    case Correction::holm: return holm_correction(p_values);
    case Correction::bonferroni: return bonferroni_correction(p_values);
    case Correction::none: return {p_values.begin(), p_values.end()};
  }
  throw std::logic_error("unhandled correction");
}

std::string_view to_string(PairingUnit p) {
  switch (p) {
    case PairingUnit::automatic: return "auto";
    case PairingUnit::votes: return "votes";
    case PairingUnit::file_mos: return "file-mos";
  }
  return "?";
}

PairingUnit parse_pairing_unit(std::string_view text) {
  if (text == "auto") return PairingUnit::automatic;
  if (text == "votes") return PairingUnit::votes;
  if (text == "file-mos") return PairingUnit::file_mos;
  throw InputError("unknown pairing unit '" + std::string(text) + "' (expected auto|votes|file-mos)");
}

namespace {

// Votes of one condition keyed by (file slot, rater); slots follow stimulus id order.
struct ConditionLayout {
  std::vector<std::tuple<std::size_t, std::string, double>> votes;  // sorted by (slot, rater)
  std::vector<double> file_mos;
};

std::vector<ConditionLayout> build_layouts(const RatingsDataset& dataset) {
  std::vector<ConditionLayout> layouts;
  layouts.reserve(dataset.conditions().size());
  for (const auto& c : dataset.conditions()) {
    ConditionLayout layout;
    for (std::size_t slot = 0; slot < c.stimuli.size(); ++slot) {
      const auto& s = dataset.stimuli()[c.stimuli[slot]];
      double sum = 0.0;
      for (const auto& r : dataset.votes(s)) {
        layout.votes.emplace_back(slot, r.rater_id, r.score);
        sum += r.score;
      }
      layout.file_mos.push_back(sum / static_cast<double>(s.count));
    }
    layouts.push_back(std::move(layout));
  }
  return layouts;
}

bool same_vote_layout(const ConditionLayout& a, const ConditionLayout& b) {
  if (a.votes.size() != b.votes.size()) return false;
  for (std::size_t i = 0; i < a.votes.size(); ++i) {
    if (std::get<0>(a.votes[i]) != std::get<0>(b.votes[i]) || std::get<1>(a.votes[i]) != std::get<1>(b.votes[i])) {
      return false;
    }
  }
  return true;
}

struct PairedSamples {
  std::vector<double> x;
  std::vector<double> y;
  PairingUnit unit = PairingUnit::votes;
};

std::optional<PairedSamples> pair_conditions(const ConditionLayout& a, const ConditionLayout& b, PairingUnit unit,
                                             std::string& reason) {
  const bool votes_ok = same_vote_layout(a, b);
  const bool files_ok = a.file_mos.size() == b.file_mos.size();
  if (unit != PairingUnit::file_mos && votes_ok) {
    PairedSamples out;
    for (std::size_t i = 0; i < a.votes.size(); ++i) {
      out.x.push_back(std::get<2>(a.votes[i]));
      out.y.push_back(std::get<2>(b.votes[i]));
    }
    return out;
  }
  if (unit == PairingUnit::votes) {
    reason = "vote layouts (file slot x rater) differ";
    return std::nullopt;
  }
  if (files_ok) return PairedSamples{a.file_mos, b.file_mos, PairingUnit::file_mos};
  reason = "conditions have different file counts";
  return std::nullopt;
}

struct TestFamily {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

SignificanceReport run_family(const RatingsDataset& dataset, const TestFamily& family,
                              const SignificanceOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const auto& conditions = dataset.conditions();
  const std::size_t j = conditions.size();
  const auto layouts = build_layouts(dataset);

  SignificanceReport report;
  auto& matrix = report.matrix;
  matrix.alpha = options.alpha;
  matrix.correction = options.correction;
  for (const auto& c : conditions) matrix.condition_ids.push_back(c.id);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  matrix.p_values.assign(j * j, nan);
  matrix.raw_p_values.assign(j * j, nan);

  std::vector<std::pair<std::size_t, std::size_t>> tested;
  std::vector<double> raw;
  bool fell_back = false;
  for (const auto& [a, b] : family.pairs) {
    std::string reason;
    const auto paired = pair_conditions(layouts[a], layouts[b], options.pairing, reason);
    if (!paired) {
      report.unpaired.push_back({conditions[a].id, conditions[b].id, reason});
      continue;
    }
    if (options.pairing == PairingUnit::automatic && paired->unit == PairingUnit::file_mos) fell_back = true;
    tested.emplace_back(a, b);
    raw.push_back(wilcoxon_signed_rank(paired->x, paired->y).p_value);
  }
  if (fell_back) {
    report.warnings.push_back("vote layouts differ for some condition pairs; those pairs were tested on per-file MOS");
  }
  const auto adjusted = correct(raw, options.correction);
  for (std::size_t k = 0; k < tested.size(); ++k) {
    const auto [a, b] = tested[k];
    matrix.raw_p_values[a * j + b] = matrix.raw_p_values[b * j + a] = raw[k];
    matrix.p_values[a * j + b] = matrix.p_values[b * j + a] = adjusted[k];
  }
  return report;
}

std::vector<double> condition_mos(const RatingsDataset& dataset) {
  std::vector<double> out;
  for (const auto& row : mos_per_condition(dataset).rows()) out.push_back(row.mos);
  return out;  // conditions() and the MOS table share id order
}

}  // namespace

std::vector<std::string> percentile_anchors(const RatingsDataset& dataset, std::span<const double> percentiles) {
  const auto& conditions = dataset.conditions();
  if (conditions.empty()) throw InputError("dataset has no conditions");
  const auto mos = condition_mos(dataset);
  std::vector<std::size_t> order(conditions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mos[a] < mos[b]; });
  std::vector<std::string> anchors;
  for (const double p : percentiles) {
    if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
    const auto idx = static_cast<std::size_t>(std::lround(p / 100.0 * static_cast<double>(order.size() - 1)));
    anchors.push_back(conditions[order[idx]].id);
  }
  return anchors;
}

SignificanceReport neighborhood_analysis(const RatingsDataset& dataset, const NeighborhoodOptions& options) {
  const auto& conditions = dataset.conditions();
  if (conditions.size() < 2) throw InputError("significance analysis needs at least 2 conditions");

  std::vector<std::string> anchors = options.anchors;
  std::vector<double> percentile_of(anchors.size(), std::numeric_limits<double>::quiet_NaN());
  if (anchors.empty()) {
    anchors = percentile_anchors(dataset, options.percentiles);
    percentile_of = options.percentiles;
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < conditions.size(); ++i) index.emplace(conditions[i].id, i);
  std::vector<std::size_t> anchor_idx;
  for (const auto& a : anchors) {
    const auto it = index.find(a);
    if (it == index.end()) throw InputError("unknown anchor condition '" + a + "'");
    anchor_idx.push_back(it->second);
  }

  std::set<std::pair<std::size_t, std::size_t>> unique_pairs;
  for (const auto a : anchor_idx) {
    for (std::size_t c = 0; c < conditions.size(); ++c) {
      if (c != a) unique_pairs.emplace(std::min(a, c), std::max(a, c));
    }
  }
  TestFamily family{{unique_pairs.begin(), unique_pairs.end()}};
  auto report = run_family(dataset, family, options);

  const auto mos = condition_mos(dataset);
  for (std::size_t k = 0; k < anchor_idx.size(); ++k) {
    const auto a = anchor_idx[k];
    Neighborhood hood{conditions[a].id, percentile_of[k], mos[a], {}};
    for (std::size_t c = 0; c < conditions.size(); ++c) {
      if (c != a && report.matrix.tested(a, c) && !report.matrix.distinguishable(a, c)) {
        hood.indistinguishable.push_back(conditions[c].id);
      }
    }
    report.neighborhoods.push_back(std::move(hood));
  }
  return report;
}

SignificanceReport significance_matrix(const RatingsDataset& dataset, const SignificanceOptions& options) {
  const std::size_t j = dataset.conditions().size();
  if (j < 2) throw InputError("significance analysis needs at least 2 conditions");
  TestFamily family;
  for (std::size_t a = 0; a < j; ++a) {
    for (std::size_t b = a + 1; b < j; ++b) family.pairs.emplace_back(a, b);
  }
  return run_family(dataset, family, options);
}

}  // namespace qmeval
