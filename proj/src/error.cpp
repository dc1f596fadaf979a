#include "upm/error.hpp"

namespace upm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::DegenerateArm: return "DegenerateArm";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::EnvelopeDegenerate: return "EnvelopeDegenerate";
    case ErrorCode::IterationCap: return "IterationCap";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::GridTooCoarse:
    case ErrorCode::EnvelopeDegenerate:
    case ErrorCode::IterationCap:
      return ErrorCategory::Numeric;
    case ErrorCode::InvalidArgument:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace upm
