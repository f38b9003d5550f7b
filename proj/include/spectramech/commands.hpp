#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spectramech {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitInvariant = 3,
  kExitSolver = 4,
  kExitVerificationFailed = 5,
  kExitUsage = 64,
};

/// Runs one CLI invocation; `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spectramech
