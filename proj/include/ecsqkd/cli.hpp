#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecsqkd::cli {

/// Process exit codes; stable for scripts and CI.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kComputation = 2,  // domain errors, I/O failures, truncation failures
  kVerificationFailed = 3,
  kNoCrossover = 4,
};

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecsqkd::cli
