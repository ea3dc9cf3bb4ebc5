#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmeval/dataset.hpp"

namespace qmeval {

struct WilcoxonResult {
  double p_value = 1.0;    // two-sided
  double statistic = 0.0;  // W+, the rank sum of positive differences
  std::size_t n_nonzero = 0;
  bool exact = true;
  // Every difference was zero; the test carries no information and p = 1.
  bool degenerate = false;
};

// Largest number of non-zero differences handled by the exact null distribution.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

// Paired two-sided signed-rank test. Zero differences are dropped, tied
// |differences| share average ranks. Up to kWilcoxonExactLimit non-zero
// differences the p-value comes from the exact permutation distribution of
// W+ (ties included); above it, a tie-corrected normal approximation with
// continuity correction is used. Throws std::invalid_argument on unequal
// lengths.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

enum class Correction { holm, bonferroni, none };
std::string_view to_string(Correction c);
Correction parse_correction(std::string_view text);

std::vector<double> holm_correction(std::span<const double> p_values);
std::vector<double> bonferroni_correction(std::span<const double> p_values);
std::vector<double> correct(std::span<const double> p_values, Correction method);

enum class PairingUnit {
  automatic,  // votes when the layouts match, per-file MOS otherwise
  votes,      // (file slot within condition, rater)
  file_mos,   // per-file MOS by file slot
};
std::string_view to_string(PairingUnit p);
PairingUnit parse_pairing_unit(std::string_view text);

// Condition-by-condition corrected p-values. Cells that were not tested
// (the diagonal, or pairs outside the requested rows) hold NaN.
struct SignificanceMatrix {
  std::vector<std::string> condition_ids;
  std::vector<double> p_values;      // row-major, corrected
  std::vector<double> raw_p_values;  // row-major, before correction
  double alpha = 0.05;
  Correction correction = Correction::holm;

  std::size_t size() const { return condition_ids.size(); }
  double p(std::size_t i, std::size_t j) const { return p_values[i * size() + j]; }
  double raw_p(std::size_t i, std::size_t j) const { return raw_p_values[i * size() + j]; }
  bool tested(std::size_t i, std::size_t j) const { return p(i, j) == p(i, j); }
  bool distinguishable(std::size_t i, std::size_t j) const { return tested(i, j) && p(i, j) < alpha; }
};

struct UnpairedConditions {
  std::string a;
  std::string b;
  std::string reason;
};

struct Neighborhood {
  std::string anchor;
  // Percentile that selected the anchor; NaN for explicitly named anchors.
  double percentile = std::numeric_limits<double>::quiet_NaN();
  double anchor_mos = 0.0;
  std::vector<std::string> indistinguishable;  // sorted by id, anchor excluded
};

struct SignificanceOptions {
  double alpha = 0.05;
  Correction correction = Correction::holm;
  PairingUnit pairing = PairingUnit::automatic;
};

struct NeighborhoodOptions : SignificanceOptions {
  // Explicit anchor condition ids; when empty, anchors come from percentiles.
  std::vector<std::string> anchors;
  std::vector<double> percentiles{5.0, 50.0, 95.0};
};

struct SignificanceReport {
  SignificanceMatrix matrix;
  std::vector<Neighborhood> neighborhoods;  // empty for all-pairs analysis
  std::vector<UnpairedConditions> unpaired;
  std::vector<std::string> warnings;
};

// Conditions nearest to each percentile of the condition-MOS ranking:
// index round(p/100 * (J - 1)) into the ascending MOS order (ties by id).
std::vector<std::string> percentile_anchors(const RatingsDataset& dataset, std::span<const double> percentiles);

// Tests every anchor against every other condition, corrects over that
// family and lists, per anchor, the conditions it cannot be told apart from.
SignificanceReport neighborhood_analysis(const RatingsDataset& dataset, const NeighborhoodOptions& options = {});

// All J(J-1)/2 condition pairs, corrected as one family.
SignificanceReport significance_matrix(const RatingsDataset& dataset, const SignificanceOptions& options = {});

}  // namespace qmeval
