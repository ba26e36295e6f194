#pragma once

#include <string>
#include <vector>

namespace segdecide::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCheckFailed = 3;

/// Runs one subcommand. args[0] is the program name.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace segdecide::cli
