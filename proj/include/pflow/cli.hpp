#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pflow {

enum ExitCode : int { exit_ok = 0, exit_invariant = 1, exit_usage = 2 };

/// Command-line entry point. `args` excludes the program name.
/// Subcommands: run, validate, zero-dim, check-invariants, dump-defaults.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace pflow
