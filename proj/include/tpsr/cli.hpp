#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tpsr::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kRuntimeFailure = 3,
};

// Runs one command line. args[0] is the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Names of the subcommands, in help order.
std::vector<std::string> subcommands();

}  // namespace tpsr::cli
