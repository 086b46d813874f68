#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plausible::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Directory used for outputs when no explicit path is given.
inline constexpr const char* kOutputDirEnv = "PLAUSIBLE_OUTPUT_DIR";

// Runs one subcommand. args excludes the program name. Results go to files
// or to out; diagnostics go to err as single lines.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plausible::cli
