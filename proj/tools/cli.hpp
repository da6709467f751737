#pragma once

#include <iosfwd>

namespace resalloc::cli {

enum ExitCode : int {
  kConverged = 0,
  kKktFailed = 1,
  kIterationLimit = 2,
  kIoFailure = 3,
  kValidationFailure = 4,
};

// Entry point of the `resalloc` tool; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace resalloc::cli
