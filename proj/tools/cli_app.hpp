#pragma once

#include <string>
#include <vector>

namespace rhlab::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kTimeout = 3, kInvariant = 4 };

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace rhlab::cli
