#pragma once

#include <iosfwd>

namespace cournot::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kSolverError = 1,
  kInputError = 2,
  kCheckFailed = 3,
};

/// Parses argv and runs one subcommand: basin, aperture, arrival,
/// trajectory, intercept, value or check.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace cournot::cli
