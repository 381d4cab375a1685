#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace nlod {

/// Runs the command-line interface on `args` (without the program name).
/// Returns the process exit code: 0 success, 1 validation/usage error,
/// 2 solver non-convergence, 3 I/O error.
int cli_run(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace nlod
