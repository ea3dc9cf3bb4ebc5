#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmeval/dataset.hpp"

namespace qmeval {

// How the confidence-interval half-width divides the standard deviation.
enum class CiDivisor {
  standard,  // lambda / sqrt(M), the standard error of the mean
  linear,    // lambda / M
};

// Degrees of freedom passed to the Student-t quantile.
enum class DfConvention { votes, votes_minus_one };

std::string_view to_string(CiDivisor d);
std::string_view to_string(DfConvention d);
CiDivisor parse_ci_divisor(std::string_view text);
DfConvention parse_df_convention(std::string_view text);

// 95% confidence-interval configuration. The confidence level is fixed.
struct CiPolicy {
  CiDivisor divisor = CiDivisor::standard;
  DfConvention df = DfConvention::votes_minus_one;
  // At or above this vote count the normal value z_value replaces the t quantile.
  std::size_t large_sample_cutoff = 30;
  double z_value = 1.96;

  // Throws std::invalid_argument when cutoff < 2 or z_value <= 0.
  void validate() const;
};

// Two-sided 95% quantile for a mean over `votes` ratings.
double t_quantile(std::size_t votes, const CiPolicy& policy);

// t * std / divisor(votes), using a precomputed quantile.
double ci_halfwidth(double std_dev, std::size_t votes, double t_value, const CiPolicy& policy);
double ci_halfwidth(double std_dev, std::size_t votes, const CiPolicy& policy);

struct VoteSummary {
  double mean = 0.0;
  double std_dev = 0.0;  // unbiased, (n - 1) denominator
  std::size_t votes = 0;
};

// Throws InputError for fewer than two votes.
VoteSummary summarize_votes(std::span<const double> scores);

// Condition-level pooling of per-file summaries: the mean over all votes and
// sqrt(sum_i (M_i - 1) s_i^2 / (N - 1)) with N the total vote count. With
// equal M per file this is sqrt((M - 1)/(N - 1) * sum_i s_i^2).
VoteSummary pool_files(std::span<const VoteSummary> files);

struct MosRow {
  std::string id;
  double mos = 0.0;
  double std_dev = 0.0;
  std::size_t votes = 0;
  double ci95 = 0.0;  // half-width
};

class MosTable {
 public:
  MosTable(std::vector<MosRow> rows, Granularity granularity);

  const std::vector<MosRow>& rows() const { return rows_; }  // sorted by id
  Granularity granularity() const { return granularity_; }
  std::size_t size() const { return rows_.size(); }
  const MosRow* find(std::string_view id) const;

 private:
  std::vector<MosRow> rows_;
  Granularity granularity_;
};

MosTable mos_per_file(const RatingsDataset& dataset, const CiPolicy& policy = {});
MosTable mos_per_condition(const RatingsDataset& dataset, const CiPolicy& policy = {});
MosTable mos_table(const RatingsDataset& dataset, Granularity granularity, const CiPolicy& policy = {});

// CSV with header id,mos,std,votes,ci95.
void write_mos_csv(std::ostream& out, const MosTable& table);

}  // namespace qmeval
