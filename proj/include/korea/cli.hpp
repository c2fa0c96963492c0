#pragma once

#include "korea/errors.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace korea {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

int exit_code_for(ErrorCode code);

/// Entry point of the `korea` command; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace korea
