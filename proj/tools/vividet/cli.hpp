#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vividet::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDataError = 3,
  kDivergence = 4,
};

/// Runs the command line `args`, program name excluded. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vividet::cli
