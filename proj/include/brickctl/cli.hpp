#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brickctl {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInput = 2,
  kExitNoSupervisor = 3,
  kExitStateCap = 4,
  kExitBlocking = 5,
  kExitStepLimit = 6,
  kExitStuck = 7,
  kExitScript = 8,
};

/// Runs one command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace brickctl
