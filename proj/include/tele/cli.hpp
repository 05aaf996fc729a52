#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tele {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_rejected = 1,  // validation failure or access denial
  exit_input = 2,     // unreadable, malformed or missing input, bad usage
  exit_internal = 3,
};

/// Runs one subcommand. args excludes the program name. Diagnostics go to
/// `err`; stdout-bound output (help, summaries) to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tele
