#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpg {

/// Exit codes shared by the binary and in-process invocations.
enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitAssertFailed = 3,
  kExitSolver = 4,
};

/// Runs one CLI invocation (args excludes the program name). All terminal
/// output goes to the provided streams so tests can drive the CLI
/// in-process.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace mpg
