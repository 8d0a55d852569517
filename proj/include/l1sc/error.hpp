#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l1sc {

enum class ErrorCode {
  // I/O and parsing
  IoError,
  MalformedHeader,
  MalformedRow,
  MissingLabel,
  NonFiniteValue,
  EmptyClass,
  SizeMismatch,
  // argument / contract violations
  InvalidArgument,
  InsufficientClassSize,
  DimensionMismatch,
  NotUnitNorm,
  NotOrthonormal,
  NonPsdCovariance,
  NotPositiveDefinite,
  // numerical degeneracies
  SingularDenominator,
  ZeroDenominatorTrace,
  ZeroWithinDispersion,
  ZeroDenominator,
  DimensionExhausted,
  NoConvergence,
  LabelOutOfRange,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` is stable and is what the CLI
/// prints; the message carries row/column/class context where there is any.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace l1sc
