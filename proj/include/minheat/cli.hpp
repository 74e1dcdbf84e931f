#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace minheat {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitNotConverged = 3,
  kExitModelUndefined = 4,
};

// Runs the command line `args` (without the program name). Reports go to
// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace minheat
