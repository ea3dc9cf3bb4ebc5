#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qmeval {

// Malformed, inconsistent or mismatched input data.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message,
                      std::optional<std::size_t> line = std::nullopt,
                      std::optional<std::size_t> column = std::nullopt);

  const std::optional<std::size_t>& line() const noexcept { return line_; }
  const std::optional<std::size_t>& column() const noexcept { return column_; }
  // Message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::optional<std::size_t> line_;
  std::optional<std::size_t> column_;
};

// The statistic is undefined for the data it was given (constant vector,
// all pairs tied, and so on). Experiments record these as missing values.
class DegenerateStatistic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The constrained pair set is empty, so the concordance index has no value.
class EmptyConstrainedSet : public DegenerateStatistic {
 public:
  EmptyConstrainedSet();
};

}  // namespace qmeval
