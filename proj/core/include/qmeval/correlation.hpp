#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace qmeval {

enum class Metric { pcc, srcc, ktau, cci };

inline constexpr Metric kAllMetrics[] = {Metric::pcc, Metric::srcc, Metric::ktau, Metric::cci};

std::string_view to_string(Metric m);
// Accepts lower- or upper-case names; throws InputError otherwise.
Metric parse_metric(std::string_view text);

struct MetricValue {
  Metric metric = Metric::pcc;
  double value = 0.0;
  std::size_t n_items = 0;
  // |S| for CCI, n(n-1)/2 for the correlation coefficients.
  std::size_t n_pairs_used = 0;
};

enum class KendallVariant { tau_b, tau_a };

std::string_view to_string(KendallVariant v);
KendallVariant parse_kendall_variant(std::string_view text);

// All three throw std::invalid_argument on length mismatch or fewer than two
// items, and DegenerateStatistic when either vector has no spread.
MetricValue pcc(std::span<const double> y, std::span<const double> y_hat);
MetricValue srcc(std::span<const double> y, std::span<const double> y_hat);
// O(n log n) merge-sort inversion count.
MetricValue ktau(std::span<const double> y, std::span<const double> y_hat,
                 KendallVariant variant = KendallVariant::tau_b);

// 1-based fractional ranks; ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace qmeval
