#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldptop {

/// Exit codes of the command-line front-end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `ldptop` subcommand; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ldptop
