#pragma once

#include <string>
#include <vector>

namespace asgd::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kRuntimeAbort = 3,
  kNoConvergence = 4,
};

inline constexpr const char* kToolVersion = "0.1.0";

// Entry point for `asgd <command> ...`; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace asgd::cli
