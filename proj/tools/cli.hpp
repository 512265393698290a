#pragma once

#include <string>
#include <vector>

namespace rydopt::cli {

// Parse and dispatch; returns the process exit code.
// 0 success, 2 config/usage error, 3 numerical error, 4 I/O error.
int run(const std::vector<std::string>& args);

} // namespace rydopt::cli
