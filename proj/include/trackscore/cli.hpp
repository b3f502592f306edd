#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trackscore {

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

/// Entry point of the `trackscore` tool. args[0] is the program name.
/// Subcommands: eval, sweep, scenarios, oracle-check.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trackscore
