#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resalloc {

enum class ErrorCode {
  kDimensionMismatch,
  kNonPositiveLimit,
  kNonPositiveDemand,
  kNegativeEfficiency,
  kInvalidUtility,
  kInvalidOption,
  kZeroEfficiencyRowWithLogUtility,
  kDomainViolation,
  kNotStrictlyConcave,
  kUnsupportedFamily,
  kTOutOfSegment,
  kProjectionNotConverged,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; the code
// lets callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace resalloc
