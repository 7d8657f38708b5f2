#pragma once

#include <ostream>

namespace samp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAllDiverged = 3;
inline constexpr int kExitRuntime = 4;

// Entry point of the `samp` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace samp::cli
