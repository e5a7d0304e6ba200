#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace popsteady::cli {

enum ExitCode : int { kSuccess = 0, kMathFailure = 1, kUsage = 2 };

/// Runs one subcommand. `args` excludes the program name. Results go to
/// the files named by --out and to `out`; errors and run metadata to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace popsteady::cli
