#include "qmeval/metrics.hpp"

#include "qmeval/cci.hpp"
#include "qmeval/errors.hpp"

namespace qmeval {

MetricValue evaluate_metric(Metric metric, std::span<const double> mos, std::span<const double> ci_halfwidths,
                            std::span<const double> predictions, KendallVariant variant) {
  switch (metric) {
    case Metric::pcc: return pcc(mos, predictions);
    case Metric::srcc: return srcc(mos, predictions);
    case Metric::ktau: return ktau(mos, predictions, variant);
    case Metric::cci: return cci(mos, ci_halfwidths, predictions);
  }
  throw std::logic_error("unhandled metric");
}

MetricValue evaluate_metric(Metric metric, const JoinedEvaluation& eval, KendallVariant variant) {
  return evaluate_metric(metric, eval.mos(), eval.ci_halfwidths(), eval.predictions(), variant);
}

std::optional<double> try_metric(Metric metric, std::span<const double> mos, std::span<const double> ci_halfwidths,
                                 std::span<const double> predictions, KendallVariant variant) {
  try {
    return evaluate_metric(metric, mos, ci_halfwidths, predictions, variant).value;
  } catch (const DegenerateStatistic&) {
    return std::nullopt;
  }
}

}  // namespace qmeval
