#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace herdsim::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitViolation = 1,
    kExitUsage = 2,
    kExitCap = 3,
};

/// Worker count from HERDSIM_THREADS (unset or 0: hardware concurrency).
/// Throws std::invalid_argument on a malformed value.
unsigned workers_from_env();

/// Entry point for the herdsim tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace herdsim::cli
