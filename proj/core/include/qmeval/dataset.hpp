#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmeval {

enum class Granularity { file, condition };
enum class ScaleKind { discrete, continuous };

std::string_view to_string(Granularity g);
std::string_view to_string(ScaleKind k);
Granularity parse_granularity(std::string_view text);
ScaleKind parse_scale_kind(std::string_view text);

struct Scale {
  double min = 1.0;
  double max = 5.0;
  ScaleKind kind = ScaleKind::discrete;

  static Scale acr5() { return {}; }
  // Throws InputError unless min < max, both finite and integral for discrete scales.
  void validate() const;
  bool contains(double score) const;
  // A discrete scale only admits integer scores.
  bool admits(double score) const;

  friend bool operator==(const Scale&, const Scale&) = default;
};

struct Rating {
  std::string condition_id;
  std::string stimulus_id;
  std::string rater_id;
  double score = 0.0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Long-format subjective ratings. Immutable once constructed; entries are
// held in canonical (stimulus_id, rater_id) order so row order of the source
// never leaks into downstream results. Raters need not score every stimulus.
class RatingsDataset {
 public:
  struct Stimulus {
    std::string id;
    std::string condition_id;
    std::size_t first = 0;  // offset into entries()
    std::size_t count = 0;
  };
  struct Condition {
    std::string id;
    std::vector<std::size_t> stimuli;  // indices into stimuli(), in id order
  };

  // Validates every invariant and throws InputError on the first violation.
  RatingsDataset(std::vector<Rating> entries, Scale scale);

  const std::vector<Rating>& entries() const { return entries_; }
  const Scale& scale() const { return scale_; }
  const std::vector<Stimulus>& stimuli() const { return stimuli_; }
  const std::vector<Condition>& conditions() const { return conditions_; }
  // Sorted unique rater ids.
  const std::vector<std::string>& raters() const { return raters_; }

  std::span<const Rating> votes(const Stimulus& s) const {
    return std::span<const Rating>(entries_).subspan(s.first, s.count);
  }
  const Stimulus* find_stimulus(std::string_view id) const;

  friend bool operator==(const RatingsDataset& a, const RatingsDataset& b) {
    return a.scale_ == b.scale_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<Rating> entries_;
  Scale scale_;
  std::vector<Stimulus> stimuli_;
  std::vector<Condition> conditions_;
  std::vector<std::string> raters_;
};

struct RatingsLoadOptions {
  // Overrides a "# scale: min,max,kind" header comment when set.
  std::optional<Scale> scale;
};

RatingsDataset read_ratings(std::istream& in, const RatingsLoadOptions& options = {});
RatingsDataset load_ratings(const std::filesystem::path& path, const RatingsLoadOptions& options = {});
// Writes the scale comment, the header and one row per entry; the output
// reloads to an equal dataset.
void write_ratings(std::ostream& out, const RatingsDataset& dataset);

// Objective model scores keyed by stimulus or condition id.
class PredictionTable {
 public:
  PredictionTable(std::string model_name, Granularity granularity, std::map<std::string, double> rows);

  const std::string& model_name() const { return model_name_; }
  Granularity granularity() const { return granularity_; }
  const std::map<std::string, double>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  std::optional<double> find(std::string_view id) const;

 private:
  std::string model_name_;
  Granularity granularity_;
  std::map<std::string, double> rows_;
};

// Two columns (id, score) under a header row of any names.
PredictionTable read_predictions(std::istream& in, std::string model_name, Granularity granularity);
PredictionTable load_predictions(const std::filesystem::path& path, std::string model_name,
                                 Granularity granularity);
void write_predictions(std::ostream& out, const PredictionTable& table);

}  // namespace qmeval
