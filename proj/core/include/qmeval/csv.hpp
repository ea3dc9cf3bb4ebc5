#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmeval::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based source line
};

// Minimal RFC 4180 reader: comma separator, double-quote escaping, no
// embedded newlines. Lines starting with '#' before the header are returned
// through comments(); blank lines are skipped.
class Reader {
 public:
  explicit Reader(std::istream& in);

  // Next data row, or nullopt at end of input.
  std::optional<Row> next();

  // Comment lines seen so far (without the leading '#', trimmed).
  const std::vector<std::string>& comments() const { return comments_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  bool seen_data_ = false;
  std::vector<std::string> comments_;
};

std::vector<std::string> split_line(std::string_view line, std::size_t line_number);

std::string_view trim(std::string_view s);

// Locale-independent parse of the whole field; nullopt if not a finite number.
std::optional<double> parse_double(std::string_view field);

// Shortest representation that round-trips through parse_double.
std::string format_double(double value);

// Quotes the field when it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);

}  // namespace qmeval::csv
