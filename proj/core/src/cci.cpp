#include "qmeval/cci.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "qmeval/csv.hpp"
#include "qmeval/errors.hpp"

namespace qmeval {

namespace {

bool same_order(double mos_delta, double prediction_delta) {
  return (mos_delta > 0.0 && prediction_delta > 0.0) || (mos_delta < 0.0 && prediction_delta < 0.0);
}

}  // namespace

ConstrainedPairSet build_constrained_set(const JoinedEvaluation& eval) {
  const auto& items = eval.items();
  ConstrainedPairSet set;
  set.n_items = items.size();
  set.candidate_pairs = items.size() * (items.size() - 1) / 2;
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      const double tau = pair_threshold(ci_width(items[a].ci_halfwidth), ci_width(items[b].ci_halfwidth));
      const double dm = items[a].mos - items[b].mos;
      if (!(std::fabs(dm) > tau)) continue;
      const double dp = items[a].prediction - items[b].prediction;
      set.pairs.push_back(ConstrainedPair{items[a].id, items[b].id, dm, dp, tau, same_order(dm, dp)});
    }
  }
  return set;
}

MetricValue cci(const ConstrainedPairSet& set) {
  if (set.pairs.empty()) throw EmptyConstrainedSet();
  std::size_t concordant = 0;
  for (const auto& p : set.pairs) concordant += p.concordant ? 1 : 0;
  return {Metric::cci, static_cast<double>(concordant) / static_cast<double>(set.pairs.size()), set.n_items,
          set.pairs.size()};
}

MetricValue cci(std::span<const double> mos, std::span<const double> ci_halfwidths,
                std::span<const double> predictions) {
  const std::size_t n = mos.size();
  if (ci_halfwidths.size() != n || predictions.size() != n) {
    throw std::invalid_argument("CCI inputs differ in length");
  }
  if (n < 2) throw std::invalid_argument("CCI needs at least 2 items");
  std::size_t admitted = 0;
  std::size_t concordant = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const double wa = ci_width(ci_halfwidths[a]);
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dm = mos[a] - mos[b];
      if (!(std::fabs(dm) > pair_threshold(wa, ci_width(ci_halfwidths[b])))) continue;
      ++admitted;
      concordant += same_order(dm, predictions[a] - predictions[b]) ? 1 : 0;
    }
  }
  if (admitted == 0) throw EmptyConstrainedSet();
  return {Metric::cci, static_cast<double>(concordant) / static_cast<double>(admitted), n, admitted};
}

MetricValue cci(const JoinedEvaluation& eval) {
  return cci(eval.mos(), eval.ci_halfwidths(), eval.predictions());
}

std::vector<SlopePoint> slope_decomposition(const ConstrainedPairSet& set) {
  if (set.pairs.empty()) throw EmptyConstrainedSet();
  std::vector<SlopePoint> points;
  points.reserve(set.pairs.size());
  for (const auto& p : set.pairs) {
    // A prediction tie gives slope +0.0 regardless of the MOS direction.
    const double slope = p.prediction_delta == 0.0 ? 0.0 : p.prediction_delta / p.mos_delta;
    points.push_back(SlopePoint{p.id_a, p.id_b, std::fabs(p.mos_delta), slope, p.concordant});
  }
  return points;
}

void write_slope_csv(std::ostream& out, std::span<const SlopePoint> points) {
  out << "id_a,id_b,mos_distance,slope,concordant\n";
  for (const auto& p : points) {
    out << csv::escape(p.id_a) << ',' << csv::escape(p.id_b) << ',' << csv::format_double(p.mos_distance) << ','
        << csv::format_double(p.slope) << ',' << (p.concordant ? "true" : "false") << '\n';
  }
}

}  // namespace qmeval
