#pragma once

#include <string>
#include <vector>

namespace epicost {

// Exit codes: 0 success, 1 usage, 2 instability or inapplicable parameters on
// a single (non-sweep) run, 3 I/O failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInstability = 2;
inline constexpr int kExitIo = 3;

int run_cli(std::vector<std::string> args);
int run_cli(int argc, const char* const* argv);

}  // namespace epicost
