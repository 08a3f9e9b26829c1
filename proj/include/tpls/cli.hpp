#pragma once

namespace tpls {

// Entry point for the command-line tool; returns the process exit code.
// Subcommands: simulate, fit, cv, benchmark, report, export-slices.
int cli_main(int argc, const char* const* argv);

}  // namespace tpls
