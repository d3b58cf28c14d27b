#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kincouple::cli {

/// Exit codes: 0 success, 1 numerical or verification failure, 2 usage error.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

constexpr int kSchemaVersion = 1;

/// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kincouple::cli
