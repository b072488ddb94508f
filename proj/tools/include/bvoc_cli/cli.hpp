#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bvoc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,  ///< bad arguments, malformed config, I/O failure
  kWarning = 2,     ///< degenerate or non-converged fit
  kNoMessage = 3,   ///< emit found no induced emission
};

/// Runs the command line `args` (program name excluded).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Paper r^2 targets accepted by `fit --target`.
struct FitTarget {
  const char* name;
  double r2;
};
const std::vector<FitTarget>& fit_targets();

}  // namespace bvoc::cli
