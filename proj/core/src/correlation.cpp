#include "qmeval/correlation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qmeval/errors.hpp"

namespace qmeval {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::pcc: return "PCC";
    case Metric::srcc: return "SRCC";
    case Metric::ktau: return "KTAU";
    case Metric::cci: return "CCI";
  }
  return "?";
}

Metric parse_metric(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto m : kAllMetrics) {
    if (to_string(m) == upper) return m;
  }
  throw InputError("unknown metric '" + std::string(text) + "' (expected pcc|srcc|ktau|cci)");
}

std::string_view to_string(KendallVariant v) { return v == KendallVariant::tau_b ? "tau-b" : "tau-a"; }

KendallVariant parse_kendall_variant(std::string_view text) {
  if (text == "tau-b" || text == "b") return KendallVariant::tau_b;
  if (text == "tau-a" || text == "a") return KendallVariant::tau_a;
  throw InputError("unknown Kendall variant '" + std::string(text) + "' (expected tau-b|tau-a)");
}

namespace {

void check_pair(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw std::invalid_argument("metric inputs differ in length");
  if (y.size() < 2) throw std::invalid_argument("metric needs at least 2 items");
}

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Pairs tied within runs of equal values of a sorted sequence.
template <typename Equal>
std::int64_t tied_pairs(std::span<const std::size_t> order, Equal equal) {
  std::int64_t ties = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (equal(order[i - 1], order[i])) {
      ++run;
    } else {
      ties += run * (run - 1) / 2;
      run = 1;
    }
  }
  return ties + run * (run - 1) / 2;
}

// Sorts `values` ascending and returns the number of strict inversions.
std::int64_t count_inversions(std::vector<double>& values) {
  std::vector<double> buffer(values.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < values.size(); width *= 2) {
    for (std::size_t lo = 0; lo < values.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, values.size());
      const std::size_t hi = std::min(lo + 2 * width, values.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (values[j] < values[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buffer[k++] = values[j++];
        } else {
          buffer[k++] = values[i++];
        }
      }
      while (i < mid) buffer[k++] = values[i++];
      while (j < hi) buffer[k++] = values[j++];
    }
    values.swap(buffer);
  }
  return swaps;
}

}  // namespace

MetricValue pcc(std::span<const double> y, std::span<const double> y_hat) {
  check_pair(y, y_hat);
  const auto n = static_cast<double>(y.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  const double mp = std::accumulate(y_hat.begin(), y_hat.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = y[i] - my;
    const double b = y_hat[i] - mp;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateStatistic("PCC undefined: constant input vector");
  return {Metric::pcc, clamp_unit(sxy / std::sqrt(sxx * syy)), y.size(), pair_count(y.size())};
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

MetricValue srcc(std::span<const double> y, std::span<const double> y_hat) {
  check_pair(y, y_hat);
  const auto ry = average_ranks(y);
  const auto rp = average_ranks(y_hat);
  MetricValue v;
  try {
    v = pcc(ry, rp);
  } catch (const DegenerateStatistic&) {
    throw DegenerateStatistic("SRCC undefined: constant input vector");
  }
  v.metric = Metric::srcc;
  return v;
}

MetricValue ktau(std::span<const double> y, std::span<const double> y_hat, KendallVariant variant) {
  check_pair(y, y_hat);
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return y[a] < y[b] || (y[a] == y[b] && y_hat[a] < y_hat[b]);
  });

  const auto total = static_cast<std::int64_t>(pair_count(n));
  const std::int64_t tied_y = tied_pairs(order, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });
  const std::int64_t tied_both =
      tied_pairs(order, [&](std::size_t a, std::size_t b) { return y[a] == y[b] && y_hat[a] == y_hat[b]; });

  std::vector<double> sorted_pred(n);
  for (std::size_t i = 0; i < n; ++i) sorted_pred[i] = y_hat[order[i]];
  const std::int64_t discordant = count_inversions(sorted_pred);

  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  const std::int64_t tied_pred =
      tied_pairs(identity, [&](std::size_t a, std::size_t b) { return sorted_pred[a] == sorted_pred[b]; });

  if (tied_y == total || tied_pred == total) {
    throw DegenerateStatistic("KTAU undefined: all pairs tied in one vector");
  }
  const std::int64_t c_minus_d = total - tied_y - tied_pred + tied_both - 2 * discordant;
  double value = 0.0;
  if (variant == KendallVariant::tau_b) {
    value = static_cast<double>(c_minus_d) /
            std::sqrt(static_cast<double>(total - tied_y) * static_cast<double>(total - tied_pred));
  } else {
    value = static_cast<double>(c_minus_d) / static_cast<double>(total);
  }
  return {Metric::ktau, clamp_unit(value), n, static_cast<std::size_t>(total)};
}

}  // namespace qmeval
