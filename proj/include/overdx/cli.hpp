#pragma once

#include <string>
#include <vector>

namespace overdx {

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 input/validation error, 2 internal error.
int run_cli(const std::vector<std::string>& args);

}  // namespace overdx
