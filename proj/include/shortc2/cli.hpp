#pragma once

// Command-line front end: render, verify, classify, plan validate, calibrate.
// Exit codes: 0 success, 1 property failure, 2 usage or configuration error.
// SHORTC2_PRECISION overrides the mantissa precision (bits).

#include <ostream>
#include <string>
#include <vector>

namespace shortc2 {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shortc2
