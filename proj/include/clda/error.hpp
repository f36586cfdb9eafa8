#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clda {

enum class ErrorCode {
  ShapeMismatch,
  NonFinite,
  EmptyClass,
  InvalidArgument,
  NotPositiveDefinite,
  NoConvergence,
  SingularWithinScatter,
  SingularBetweenScatter,
  DimensionTooLarge,
  DegenerateDenominator,
  AllSamplesCapped,
  EmptyTrainSet,
  GridPointFailed,
  Io,
  Parse,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularWithinScatter: return "SingularWithinScatter";
    case ErrorCode::SingularBetweenScatter: return "SingularBetweenScatter";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::AllSamplesCapped: return "AllSamplesCapped";
    case ErrorCode::EmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::GridPointFailed: return "GridPointFailed";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clda
