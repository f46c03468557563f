// Command dispatch for the surftopt CLI.
//
// Commands: solve, optimize, verify-td, verify-area, mesh-info. Errors
// map to process exit codes by domain: config 2, mesh 3, solver 4,
// optimizer 5, io 6.

#pragma once

#include "surftopt/config.hpp"
#include "surftopt/error.hpp"

namespace surftopt {

int exit_code(ErrorDomain domain);

// Executes one configured command, writing outputs under the resolved
// output directory (config out_dir, overridable by the SURFTOPT_OUT_DIR
// environment variable). Throws on failure.
void run(const RunConfig& cfg);

// Command-line entry point: `surftopt <command> [--config FILE]
// [--key value | --key=value]...`. Returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace surftopt
