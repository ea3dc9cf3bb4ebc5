#include "qmeval/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "qmeval/csv.hpp"
#include "qmeval/errors.hpp"

namespace qmeval {

std::string_view to_string(Granularity g) { return g == Granularity::file ? "file" : "condition"; }

std::string_view to_string(ScaleKind k) { return k == ScaleKind::discrete ? "discrete" : "continuous"; }

Granularity parse_granularity(std::string_view text) {
  if (text == "file" || text == "stimulus") return Granularity::file;
  if (text == "condition") return Granularity::condition;
  throw InputError("unknown granularity '" + std::string(text) + "' (expected file|condition)");
}

ScaleKind parse_scale_kind(std::string_view text) {
  if (text == "discrete") return ScaleKind::discrete;
  if (text == "continuous") return ScaleKind::continuous;
  throw InputError("unknown scale kind '" + std::string(text) + "' (expected discrete|continuous)");
}

void Scale::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw InputError("degenerate rating scale: min must be below max");
  }
  if (kind == ScaleKind::discrete && (std::floor(min) != min || std::floor(max) != max)) {
    throw InputError("discrete rating scale needs integer bounds");
  }
}

bool Scale::contains(double score) const { return score >= min && score <= max; }

bool Scale::admits(double score) const {
  return contains(score) && (kind == ScaleKind::continuous || std::floor(score) == score);
}

RatingsDataset::RatingsDataset(std::vector<Rating> entries, Scale scale)
    : entries_(std::move(entries)), scale_(scale) {
  scale_.validate();
  std::sort(entries_.begin(), entries_.end(), [](const Rating& a, const Rating& b) {
    return std::tie(a.stimulus_id, a.rater_id) < std::tie(b.stimulus_id, b.rater_id);
  });

  for (const auto& r : entries_) {
    if (r.stimulus_id.empty() || r.condition_id.empty() || r.rater_id.empty()) {
      throw InputError("empty identifier in rating row");
    }
    if (!scale_.admits(r.score)) {
      throw InputError("score " + csv::format_double(r.score) + " of stimulus '" + r.stimulus_id +
                       "' is outside the " + std::string(to_string(scale_.kind)) + " scale [" +
                       csv::format_double(scale_.min) + ", " + csv::format_double(scale_.max) + "]");
    }
  }

  for (std::size_t i = 0; i < entries_.size();) {
    std::size_t j = i;
    const auto& head = entries_[i];
    while (j < entries_.size() && entries_[j].stimulus_id == head.stimulus_id) {
      if (j > i && entries_[j].rater_id == entries_[j - 1].rater_id) {
        throw InputError("duplicate rating of stimulus '" + head.stimulus_id + "' by rater '" +
                         entries_[j].rater_id + "'");
      }
      if (entries_[j].condition_id != head.condition_id) {
        throw InputError("stimulus '" + head.stimulus_id + "' is mapped to conditions '" +
                         head.condition_id + "' and '" + entries_[j].condition_id + "'");
      }
      ++j;
    }
    if (j - i < 2) {
      throw InputError("stimulus '" + head.stimulus_id + "' has fewer than 2 ratings");
    }
    stimuli_.push_back(Stimulus{head.stimulus_id, head.condition_id, i, j - i});
    i = j;
  }

  std::map<std::string, std::vector<std::size_t>> by_condition;
  for (std::size_t s = 0; s < stimuli_.size(); ++s) by_condition[stimuli_[s].condition_id].push_back(s);
  for (auto& [id, members] : by_condition) conditions_.push_back(Condition{id, std::move(members)});

  for (const auto& r : entries_) raters_.push_back(r.rater_id);
  std::sort(raters_.begin(), raters_.end());
  raters_.erase(std::unique(raters_.begin(), raters_.end()), raters_.end());
}

const RatingsDataset::Stimulus* RatingsDataset::find_stimulus(std::string_view id) const {
  const auto it = std::lower_bound(stimuli_.begin(), stimuli_.end(), id,
                                   [](const Stimulus& s, std::string_view key) { return s.id < key; });
  if (it == stimuli_.end() || it->id != id) return nullptr;
  return &*it;
}

namespace {

std::optional<Scale> scale_from_comments(const std::vector<std::string>& comments) {
  for (const auto& comment : comments) {
    std::string_view text = comment;
    if (text.rfind("scale", 0) != 0) continue;
    text.remove_prefix(5);
    text = csv::trim(text);
    if (text.empty() || (text.front() != ':' && text.front() != '=')) continue;
    text.remove_prefix(1);
    const auto parts = csv::split_line(text, 0);
    if (parts.size() != 3) throw InputError("scale metadata must read 'scale: min,max,kind'");
    const auto lo = csv::parse_double(parts[0]);
    const auto hi = csv::parse_double(parts[1]);
    if (!lo || !hi) throw InputError("non-numeric bound in scale metadata");
    Scale scale{*lo, *hi, parse_scale_kind(parts[2])};
    scale.validate();
    return scale;
  }
  return std::nullopt;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

RatingsDataset read_ratings(std::istream& in, const RatingsLoadOptions& options) {
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw InputError("ratings file is empty");

  constexpr std::string_view required[] = {"condition_id", "stimulus_id", "rater_id", "score"};
  std::size_t column[4];
  for (std::size_t k = 0; k < 4; ++k) {
    const auto it = std::find(header->fields.begin(), header->fields.end(), required[k]);
    if (it == header->fields.end()) {
      throw InputError("missing required column '" + std::string(required[k]) + "'", header->line);
    }
    column[k] = static_cast<std::size_t>(it - header->fields.begin());
  }

  std::optional<Scale> scale = options.scale;
  if (!scale) scale = scale_from_comments(reader.comments());
  if (!scale) {
    throw InputError("rating scale not declared (add '# scale: min,max,kind' or pass scale options)");
  }
  scale->validate();

  std::vector<Rating> entries;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::unordered_map<std::string, std::pair<std::string, std::size_t>> condition_of;
  const std::size_t width = header->fields.size();
  while (auto row = reader.next()) {
    if (row->fields.size() != width) {
      throw InputError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(row->fields.size()),
                       row->line);
    }
    Rating r;
    r.condition_id = row->fields[column[0]];
    r.stimulus_id = row->fields[column[1]];
    r.rater_id = row->fields[column[2]];
    for (std::size_t k = 0; k < 3; ++k) {
      if (row->fields[column[k]].empty()) {
        throw InputError("empty " + std::string(required[k]), row->line, column[k] + 1);
      }
    }
    const auto score = csv::parse_double(row->fields[column[3]]);
    if (!score) {
      throw InputError("non-numeric score '" + row->fields[column[3]] + "'", row->line, column[3] + 1);
    }
    if (!scale->admits(*score)) {
      throw InputError("score " + row->fields[column[3]] + " is outside the " +
                           std::string(to_string(scale->kind)) + " scale [" +
                           csv::format_double(scale->min) + ", " + csv::format_double(scale->max) + "]",
                       row->line, column[3] + 1);
    }
    r.score = *score;

    const auto [it, inserted] = seen.emplace(std::make_pair(r.stimulus_id, r.rater_id), row->line);
    if (!inserted) {
      throw InputError("duplicate rating of stimulus '" + r.stimulus_id + "' by rater '" + r.rater_id +
                           "' (first seen on line " + std::to_string(it->second) + ")",
                       row->line);
    }
    const auto [cit, fresh] = condition_of.emplace(r.stimulus_id, std::make_pair(r.condition_id, row->line));
    if (!fresh && cit->second.first != r.condition_id) {
      throw InputError("stimulus '" + r.stimulus_id + "' mapped to condition '" + r.condition_id +
                           "' but line " + std::to_string(cit->second.second) + " maps it to '" +
                           cit->second.first + "'",
                       row->line, column[0] + 1);
    }
    entries.push_back(std::move(r));
  }
  return RatingsDataset(std::move(entries), *scale);
}

RatingsDataset load_ratings(const std::filesystem::path& path, const RatingsLoadOptions& options) {
  auto in = open_input(path);
  return read_ratings(in, options);
}

void write_ratings(std::ostream& out, const RatingsDataset& dataset) {
  const auto& scale = dataset.scale();
  out << "# scale: " << csv::format_double(scale.min) << ',' << csv::format_double(scale.max) << ','
      << to_string(scale.kind) << '\n';
  out << "condition_id,stimulus_id,rater_id,score\n";
  for (const auto& r : dataset.entries()) {
    out << csv::escape(r.condition_id) << ',' << csv::escape(r.stimulus_id) << ','
        << csv::escape(r.rater_id) << ',' << csv::format_double(r.score) << '\n';
  }
}

PredictionTable::PredictionTable(std::string model_name, Granularity granularity,
                                 std::map<std::string, double> rows)
    : model_name_(std::move(model_name)), granularity_(granularity), rows_(std::move(rows)) {}

std::optional<double> PredictionTable::find(std::string_view id) const {
  const auto it = rows_.find(std::string(id));
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

PredictionTable read_predictions(std::istream& in, std::string model_name, Granularity granularity) {
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw InputError("prediction file is empty");
  if (header->fields.size() != 2) {
    throw InputError("prediction file needs exactly two columns (id, score)", header->line);
  }
  std::map<std::string, double> rows;
  std::map<std::string, std::size_t> first_line;
  while (auto row = reader.next()) {
    if (row->fields.size() != 2) {
      throw InputError("expected 2 fields, found " + std::to_string(row->fields.size()), row->line);
    }
    if (row->fields[0].empty()) throw InputError("empty id", row->line, 1);
    const auto score = csv::parse_double(row->fields[1]);
    if (!score) throw InputError("non-numeric score '" + row->fields[1] + "'", row->line, 2);
    const auto [it, inserted] = first_line.emplace(row->fields[0], row->line);
    if (!inserted) {
      throw InputError("duplicate id '" + row->fields[0] + "' (first seen on line " +
                           std::to_string(it->second) + ")",
                       row->line, 1);
    }
    rows.emplace(row->fields[0], *score);
  }
  if (rows.empty()) throw InputError("prediction file has no rows");
  return PredictionTable(std::move(model_name), granularity, std::move(rows));
}

PredictionTable load_predictions(const std::filesystem::path& path, std::string model_name,
                                 Granularity granularity) {
  auto in = open_input(path);
  return read_predictions(in, std::move(model_name), granularity);
}

void write_predictions(std::ostream& out, const PredictionTable& table) {
  out << "id,score\n";
  for (const auto& [id, score] : table.rows()) {
    out << csv::escape(id) << ',' << csv::format_double(score) << '\n';
  }
}

}  // namespace qmeval
