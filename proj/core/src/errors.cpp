#include "resalloc/errors.hpp"

namespace resalloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveLimit: return "NonPositiveLimit";
    case ErrorCode::kNonPositiveDemand: return "NonPositiveDemand";
    case ErrorCode::kNegativeEfficiency: return "NegativeEfficiency";
    case ErrorCode::kInvalidUtility: return "InvalidUtility";
    case ErrorCode::kInvalidOption: return "InvalidOption";
    case ErrorCode::kZeroEfficiencyRowWithLogUtility: return "ZeroEfficiencyRowWithLogUtility";
    case ErrorCode::kDomainViolation: return "DomainViolation";
    case ErrorCode::kNotStrictlyConcave: return "NotStrictlyConcave";
    case ErrorCode::kUnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::kTOutOfSegment: return "TOutOfSegment";
    case ErrorCode::kProjectionNotConverged: return "ProjectionNotConverged";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace resalloc
