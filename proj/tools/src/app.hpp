#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catport::cli {

enum ExitCode : int {
  kOk = 0,
  kValidateFailed = 1,
  kInvalidConfig = 2,
  kCutoffTooSmall = 3,
};

/// Full command line (argv[0] included); returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace catport::cli
