#pragma once

#include <ostream>

namespace dhillon::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kBadInput = 2,
  kImproperPosterior = 3,
  kNotConverged = 4,
};

/// Runs one command line. Reports go to `out` and files under --out-dir;
/// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dhillon::cli
