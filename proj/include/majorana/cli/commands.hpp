// Subcommands of the command-line tool. Each returns a process exit code;
// results go to files under RunOptions::out, or to `out` when no output
// directory is given. Nothing is written when a command fails.
#pragma once

#include <ostream>
#include <string>

#include "majorana/cli/config.hpp"

namespace majorana::cli {

int cmd_stars(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_state(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_norm(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_berry(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_boson_sweep(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_entangle(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_selftest(const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Dispatches by subcommand name, mapping exceptions to exit codes.
int run_command(const std::string& name, const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Full argument parsing and dispatch.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace majorana::cli
