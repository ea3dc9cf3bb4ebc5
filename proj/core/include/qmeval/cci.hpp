#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qmeval/correlation.hpp"
#include "qmeval/evaluation.hpp"

namespace qmeval {

// Constrained Concordance Index.
//
// A pair (a, b) is admitted when its MOS distance strictly exceeds
//
//     tau_ab = width_a / 2 + width_b / 2
//
// where width is the full 95% confidence interval, i.e. twice the stored
// half-width. tau_ab is then h_a + h_b: the pair is admitted exactly when the
// two symmetric intervals do not overlap. The index is the fraction of
// admitted pairs whose prediction order agrees with the MOS order. A pair the
// model scores equally (prediction tie) counts as discordant.

inline double ci_width(double halfwidth) { return 2.0 * halfwidth; }
inline double pair_threshold(double width_a, double width_b) { return width_a / 2.0 + width_b / 2.0; }

struct ConstrainedPair {
  std::string id_a;  // id_a < id_b
  std::string id_b;
  double mos_delta = 0.0;         // y_a - y_b, never 0
  double prediction_delta = 0.0;  // y_hat_a - y_hat_b
  double tau = 0.0;
  bool concordant = false;
};

struct ConstrainedPairSet {
  std::vector<ConstrainedPair> pairs;
  std::size_t n_items = 0;
  std::size_t candidate_pairs = 0;  // n(n-1)/2 before filtering
};

// Throws InputError for fewer than 2 items.
ConstrainedPairSet build_constrained_set(const JoinedEvaluation& eval);

// Throws EmptyConstrainedSet when the set has no pairs.
MetricValue cci(const ConstrainedPairSet& set);

// Same value as cci(build_constrained_set(...)) without materialising pairs.
MetricValue cci(std::span<const double> mos, std::span<const double> ci_halfwidths,
                std::span<const double> predictions);
MetricValue cci(const JoinedEvaluation& eval);

struct SlopePoint {
  std::string id_a;
  std::string id_b;
  double mos_distance = 0.0;  // |y_a - y_b| > 0
  double slope = 0.0;         // prediction_delta / mos_delta
  bool concordant = false;
};

// One point per admitted pair; throws EmptyConstrainedSet for an empty set.
std::vector<SlopePoint> slope_decomposition(const ConstrainedPairSet& set);

// CSV with header id_a,id_b,mos_distance,slope,concordant.
void write_slope_csv(std::ostream& out, std::span<const SlopePoint> points);

}  // namespace qmeval
