#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bent {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitNotFound = 3,
    kExitVerificationFailed = 4,
};

/// Entry point of the `bent` tool; args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace bent
