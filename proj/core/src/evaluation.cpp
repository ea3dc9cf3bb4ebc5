#include "qmeval/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "qmeval/errors.hpp"

namespace qmeval {

JoinedEvaluation::JoinedEvaluation(std::vector<EvaluationItem> items, Granularity granularity,
                                   std::optional<Scale> scale)
    : items_(std::move(items)), granularity_(granularity), scale_(scale) {
  if (items_.size() < 2) throw InputError("an evaluation needs at least 2 items");
  std::sort(items_.begin(), items_.end(),
            [](const EvaluationItem& a, const EvaluationItem& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& it = items_[i];
    if (i > 0 && it.id == items_[i - 1].id) throw InputError("duplicate evaluation id '" + it.id + "'");
    if (!std::isfinite(it.mos) || !std::isfinite(it.prediction) || !std::isfinite(it.ci_halfwidth)) {
      throw InputError("non-finite value for item '" + it.id + "'");
    }
    if (it.ci_halfwidth < 0.0) throw InputError("negative CI half-width for item '" + it.id + "'");
    if (scale_ && !scale_->contains(it.mos)) throw InputError("MOS of '" + it.id + "' is outside the scale");
  }
  mos_.reserve(items_.size());
  ci_.reserve(items_.size());
  pred_.reserve(items_.size());
  for (const auto& it : items_) {
    mos_.push_back(it.mos);
    ci_.push_back(it.ci_halfwidth);
    pred_.push_back(it.prediction);
  }
}

JoinedEvaluation JoinedEvaluation::subset(std::span<const std::size_t> indices) const {
  std::vector<EvaluationItem> picked;
  picked.reserve(indices.size());
  for (const auto i : indices) picked.push_back(items_.at(i));
  return JoinedEvaluation(std::move(picked), granularity_, scale_);
}

JoinResult join(const MosTable& mos, const PredictionTable& predictions, std::optional<Scale> scale) {
  if (mos.granularity() != predictions.granularity()) {
    throw InputError("granularity mismatch: MOS table is per " + std::string(to_string(mos.granularity())) +
                     " but predictions of '" + predictions.model_name() + "' are per " +
                     std::string(to_string(predictions.granularity())));
  }
  std::vector<EvaluationItem> items;
  std::vector<std::string> without_prediction;
  std::vector<std::string> unknown;
  for (const auto& row : mos.rows()) {
    if (const auto p = predictions.find(row.id)) {
      items.push_back(EvaluationItem{row.id, row.mos, row.ci95, *p});
    } else {
      without_prediction.push_back(row.id);
    }
  }
  for (const auto& [id, value] : predictions.rows()) {
    if (!mos.find(id)) unknown.push_back(id);
  }
  if (items.empty()) {
    throw InputError("no prediction id of '" + predictions.model_name() + "' matches a " +
                     std::string(to_string(mos.granularity())) + " id in the ratings");
  }
  if (items.size() < 2) throw InputError("only one id is shared between ratings and predictions");
  return JoinResult{JoinedEvaluation(std::move(items), mos.granularity(), scale), std::move(without_prediction),
                    std::move(unknown)};
}

}  // namespace qmeval
