#include "l1sc/error.hpp"

namespace l1sc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientClassSize: return "InsufficientClassSize";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotUnitNorm: return "NotUnitNorm";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::NonPsdCovariance: return "NonPsdCovariance";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::ZeroDenominatorTrace: return "ZeroDenominatorTrace";
    case ErrorCode::ZeroWithinDispersion: return "ZeroWithinDispersion";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::DimensionExhausted: return "DimensionExhausted";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
  }
  return "Unknown";
}

}  // namespace l1sc
