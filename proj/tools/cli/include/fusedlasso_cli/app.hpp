#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fusedlasso::cli {

enum ExitStatus : int {
    kExitOk = 0,
    kExitUsage = 1, ///< bad flags, missing arguments, unknown values
    kExitData = 2,  ///< unreadable or malformed input, dimension mismatches, solver rejections
};

/**
 * Parses `args` (without the program name) and runs one subcommand:
 * solve, path, simulate, verify or bench. Results go to --out when given,
 * otherwise to `out`; diagnostics go to `err`.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fusedlasso::cli
