#pragma once

namespace teachdemo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the teachdemo binary. Output goes to stdout, logs and
/// error messages to stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace teachdemo
