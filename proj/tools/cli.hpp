// cli.hpp - bathkit command-line front end
//
// Subcommands: eval-sd, discretize, reconstruct, build-model, propagate, validate.
// Data goes to --out (or stdout), diagnostics to stderr.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bathkit::cli {

// Stable process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_nonconvergence = 3,
    exit_resource = 4,
    exit_validation = 5,
};

inline constexpr const char* tool_version = "0.3.0";

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bathkit::cli
