#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace decern {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSchema = 4;

// Subcommands: generate, run, sweep, report. Human tables go to `out`,
// diagnostics to `err`; machine artifacts only to files.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Same, with args[0] taken as the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace decern
