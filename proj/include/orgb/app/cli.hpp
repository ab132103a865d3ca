#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace orgb::app {

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one `orgb` command line. `args` excludes the program name. Machine
/// output goes to `out` (or the files named by flags); diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orgb::app
