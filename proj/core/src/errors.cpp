#include "qmeval/errors.hpp"

namespace qmeval {

namespace {

std::string with_location(const std::string& message, const std::optional<std::size_t>& line,
                          const std::optional<std::size_t>& column) {
  if (!line) return message;
  std::string out = "line " + std::to_string(*line);
  if (column) out += ", column " + std::to_string(*column);
  return out + ": " + message;
}

}  // namespace

InputError::InputError(const std::string& message, std::optional<std::size_t> line,
                       std::optional<std::size_t> column)
    : std::runtime_error(with_location(message, line, column)),
      detail_(message),
      line_(line),
      column_(column) {}

EmptyConstrainedSet::EmptyConstrainedSet()
    : DegenerateStatistic("no statistically distinguishable pairs: constrained set is empty") {}

}  // namespace qmeval
