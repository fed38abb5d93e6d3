#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grasp::cli {

/// Runs one command line (args exclude the program name).
/// Exit codes: plan returns 0 when at least one grasp is accepted, 2 when
/// none is; every command returns 1 on bad input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grasp::cli
