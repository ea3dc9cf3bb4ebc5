#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDegenerate = 3;

// Runs the command line `args` (program name excluded) and returns the
// process exit code. Diagnostics go to `err`, summaries to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmeval::cli
