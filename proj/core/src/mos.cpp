#include "qmeval/mos.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "qmeval/csv.hpp"
#include "qmeval/errors.hpp"

namespace qmeval {

std::string_view to_string(CiDivisor d) { return d == CiDivisor::standard ? "standard" : "linear"; }

std::string_view to_string(DfConvention d) { return d == DfConvention::votes ? "n" : "n-1"; }

CiDivisor parse_ci_divisor(std::string_view text) {
  if (text == "standard" || text == "sqrt") return CiDivisor::standard;
  if (text == "linear") return CiDivisor::linear;
  throw InputError("unknown CI divisor '" + std::string(text) + "' (expected standard|linear)");
}

DfConvention parse_df_convention(std::string_view text) {
  if (text == "n" || text == "votes") return DfConvention::votes;
  if (text == "n-1" || text == "votes-1") return DfConvention::votes_minus_one;
  throw InputError("unknown df convention '" + std::string(text) + "' (expected n|n-1)");
}

void CiPolicy::validate() const {
  if (large_sample_cutoff < 2) throw std::invalid_argument("CI large-sample cutoff must be >= 2");
  if (!(z_value > 0.0) || !std::isfinite(z_value)) throw std::invalid_argument("CI z value must be > 0");
}

double t_quantile(std::size_t votes, const CiPolicy& policy) {
  policy.validate();
  if (votes < 2) throw std::invalid_argument("t quantile needs at least 2 votes");
  if (votes >= policy.large_sample_cutoff) return policy.z_value;
  const auto df = static_cast<double>(policy.df == DfConvention::votes ? votes : votes - 1);
  const boost::math::students_t dist(df);
  return boost::math::quantile(dist, 0.975);
}

double ci_halfwidth(double std_dev, std::size_t votes, double t_value, const CiPolicy& policy) {
  const auto m = static_cast<double>(votes);
  const double divisor = policy.divisor == CiDivisor::standard ? std::sqrt(m) : m;
  return t_value * std_dev / divisor;
}

double ci_halfwidth(double std_dev, std::size_t votes, const CiPolicy& policy) {
  return ci_halfwidth(std_dev, votes, t_quantile(votes, policy), policy);
}

VoteSummary summarize_votes(std::span<const double> scores) {
  if (scores.size() < 2) throw InputError("at least 2 votes are needed for an unbiased standard deviation");
  double sum = 0.0;
  for (const double s : scores) sum += s;
  const double mean = sum / static_cast<double>(scores.size());
  double ss = 0.0;
  for (const double s : scores) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / static_cast<double>(scores.size() - 1)), scores.size()};
}

VoteSummary pool_files(std::span<const VoteSummary> files) {
  std::size_t total = 0;
  double weighted_sum = 0.0;
  double pooled = 0.0;
  for (const auto& f : files) {
    total += f.votes;
    weighted_sum += f.mean * static_cast<double>(f.votes);
    pooled += static_cast<double>(f.votes - 1) * f.std_dev * f.std_dev;
  }
  if (total < 2) throw InputError("condition has fewer than 2 votes");
  return {weighted_sum / static_cast<double>(total), std::sqrt(pooled / static_cast<double>(total - 1)),
          total};
}

MosTable::MosTable(std::vector<MosRow> rows, Granularity granularity)
    : rows_(std::move(rows)), granularity_(granularity) {
  std::sort(rows_.begin(), rows_.end(), [](const MosRow& a, const MosRow& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].id == rows_[i - 1].id) throw InputError("duplicate MOS id '" + rows_[i].id + "'");
  }
}

const MosRow* MosTable::find(std::string_view id) const {
  const auto it = std::lower_bound(rows_.begin(), rows_.end(), id,
                                   [](const MosRow& r, std::string_view key) { return r.id < key; });
  if (it == rows_.end() || it->id != id) return nullptr;
  return &*it;
}

namespace {

VoteSummary summarize_stimulus(const RatingsDataset& dataset, const RatingsDataset::Stimulus& s) {
  std::vector<double> scores;
  scores.reserve(s.count);
  for (const auto& r : dataset.votes(s)) scores.push_back(r.score);
  return summarize_votes(scores);
}

MosRow make_row(std::string id, const VoteSummary& v, const CiPolicy& policy) {
  return MosRow{std::move(id), v.mean, v.std_dev, v.votes, ci_halfwidth(v.std_dev, v.votes, policy)};
}

}  // namespace

MosTable mos_per_file(const RatingsDataset& dataset, const CiPolicy& policy) {
  policy.validate();
  std::vector<MosRow> rows;
  rows.reserve(dataset.stimuli().size());
  for (const auto& s : dataset.stimuli()) rows.push_back(make_row(s.id, summarize_stimulus(dataset, s), policy));
  return MosTable(std::move(rows), Granularity::file);
}

MosTable mos_per_condition(const RatingsDataset& dataset, const CiPolicy& policy) {
  policy.validate();
  std::vector<MosRow> rows;
  rows.reserve(dataset.conditions().size());
  std::vector<VoteSummary> files;
  for (const auto& c : dataset.conditions()) {
    files.clear();
    for (const auto s : c.stimuli) files.push_back(summarize_stimulus(dataset, dataset.stimuli()[s]));
    rows.push_back(make_row(c.id, pool_files(files), policy));
  }
  return MosTable(std::move(rows), Granularity::condition);
}

MosTable mos_table(const RatingsDataset& dataset, Granularity granularity, const CiPolicy& policy) {
  return granularity == Granularity::file ? mos_per_file(dataset, policy) : mos_per_condition(dataset, policy);
}

void write_mos_csv(std::ostream& out, const MosTable& table) {
  out << "id,mos,std,votes,ci95\n";
  for (const auto& r : table.rows()) {
    out << csv::escape(r.id) << ',' << csv::format_double(r.mos) << ',' << csv::format_double(r.std_dev) << ','
        << r.votes << ',' << csv::format_double(r.ci95) << '\n';
  }
}

}  // namespace qmeval
