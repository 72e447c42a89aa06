#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailbound::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitArgument = 2,
  kExitSolver = 3,
  kExitOutput = 4,
};

/// Runs `tailbound <args...>` (args exclude the program name). Reports go
/// to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tailbound::cli
