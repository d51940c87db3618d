#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relsha::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kNotConverged = 3,  // --strict only
};

// Runs the command line `args` (without the program name). Regular output
// goes to `out`, diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relsha::cli
