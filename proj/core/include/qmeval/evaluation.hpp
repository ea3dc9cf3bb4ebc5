#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmeval/dataset.hpp"
#include "qmeval/mos.hpp"

namespace qmeval {

struct EvaluationItem {
  std::string id;
  double mos = 0.0;
  double ci_halfwidth = 0.0;
  double prediction = 0.0;
};

// Aligned (MOS, CI half-width, prediction) triples, sorted by id. Every
// metric consumes this shape. Column views are cached for the hot paths.
class JoinedEvaluation {
 public:
  // Throws InputError for fewer than 2 items, duplicate ids, negative or
  // non-finite values, or MOS outside `scale` when one is given.
  JoinedEvaluation(std::vector<EvaluationItem> items, Granularity granularity,
                   std::optional<Scale> scale = std::nullopt);

  const std::vector<EvaluationItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  Granularity granularity() const { return granularity_; }
  const std::optional<Scale>& scale() const { return scale_; }

  std::span<const double> mos() const { return mos_; }
  std::span<const double> ci_halfwidths() const { return ci_; }
  std::span<const double> predictions() const { return pred_; }

  // Items at the given indices (any order; the result is re-sorted by id).
  JoinedEvaluation subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<EvaluationItem> items_;
  Granularity granularity_;
  std::optional<Scale> scale_;
  std::vector<double> mos_;
  std::vector<double> ci_;
  std::vector<double> pred_;
};

struct JoinResult {
  JoinedEvaluation evaluation;
  std::vector<std::string> without_prediction;  // MOS ids with no prediction
  std::vector<std::string> unknown_ids;         // prediction ids with no MOS
  std::size_t dropped() const { return without_prediction.size() + unknown_ids.size(); }
};

// Inner join on id. Throws InputError on granularity mismatch or when
// fewer than 2 ids are shared.
JoinResult join(const MosTable& mos, const PredictionTable& predictions,
                std::optional<Scale> scale = std::nullopt);

}  // namespace qmeval
