#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sbc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `sbc` tool; `args` excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbc
