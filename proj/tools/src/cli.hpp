#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skelgait::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kUsageError = 2,
  kConfigError = 3,
  kIoError = 4,
  kDataError = 5,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace skelgait::cli
