#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freqkf::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kNumerical = 4,
  kShape = 5,
};

// Runs one command line. `args` excludes the program name. Reports go to
// `out` when no output file is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freqkf::cli
