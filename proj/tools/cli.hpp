#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hcopt::cli {

enum ExitCode { kOk = 0, kFailure = 1, kParseError = 2, kMisuse = 3, kDivergence = 4 };

/// Runs one command line. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hcopt::cli
