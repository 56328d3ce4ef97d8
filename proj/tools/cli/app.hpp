#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace twinbeam::cli {

// Parses `args` (without the program name), runs the chosen subcommand and
// returns the process exit code. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twinbeam::cli
