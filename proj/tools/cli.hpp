#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tristat::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // unexpected internal error
  kParseFailure = 2,
  kValidationFailure = 3,
  kNumericalFailure = 4,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tristat::cli
