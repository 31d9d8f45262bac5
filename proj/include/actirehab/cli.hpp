#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace actirehab::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 validation, 2 usage, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Runs one subcommand; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace actirehab::cli
