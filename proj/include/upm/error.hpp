#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace upm {

enum class ErrorCode {
  EmptySample,
  DegreeTooHigh,
  DegreeOutOfRange,
  DomainError,
  ConstantColumn,
  DimensionMismatch,
  InvalidArgument,
  SingleGroup,
  DegenerateArm,
  DegenerateSplit,
  MissingColumn,
  ParseError,
  IoError,
  GridTooCoarse,
  EnvelopeDegenerate,
  IterationCap,
};

// Broad failure class, used by the CLI to choose an exit status.
enum class ErrorCategory { Usage, Data, Numeric };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace upm
