#pragma once

#include <optional>
#include <span>

#include "qmeval/correlation.hpp"
#include "qmeval/evaluation.hpp"

namespace qmeval {

// Dispatches to pcc/srcc/ktau/cci over aligned columns.
MetricValue evaluate_metric(Metric metric, std::span<const double> mos, std::span<const double> ci_halfwidths,
                            std::span<const double> predictions,
                            KendallVariant variant = KendallVariant::tau_b);
MetricValue evaluate_metric(Metric metric, const JoinedEvaluation& eval,
                            KendallVariant variant = KendallVariant::tau_b);

// As evaluate_metric, but a degenerate statistic yields nullopt.
std::optional<double> try_metric(Metric metric, std::span<const double> mos, std::span<const double> ci_halfwidths,
                                 std::span<const double> predictions,
                                 KendallVariant variant = KendallVariant::tau_b);

}  // namespace qmeval
