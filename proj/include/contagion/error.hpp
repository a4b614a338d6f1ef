#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contagion {

enum class ErrorCode {
  NonUnitMass,
  ShapeMismatch,
  NegativeValue,
  NonFiniteValue,
  EmptyAtomList,
  TypeCollision,
  MassOverflow,
  NegativeRate,
  InvalidTolerance,
  MaxIterations,
  ScheduleNotConverged,
  EmptyShockSet,
  ShockSetOutsideSupport,
  NonPositiveDirection,
  NotARoot,
  InitialDefaults,
  MultiImpactUnsupported,
  GridTooCoarse,
  InvalidArgument,
  ParseError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonUnitMass: return "NonUnitMass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyAtomList: return "EmptyAtomList";
    case ErrorCode::TypeCollision: return "TypeCollision";
    case ErrorCode::MassOverflow: return "MassOverflow";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::ScheduleNotConverged: return "ScheduleNotConverged";
    case ErrorCode::EmptyShockSet: return "EmptyShockSet";
    case ErrorCode::ShockSetOutsideSupport: return "ShockSetOutsideSupport";
    case ErrorCode::NonPositiveDirection: return "NonPositiveDirection";
    case ErrorCode::NotARoot: return "NotARoot";
    case ErrorCode::InitialDefaults: return "InitialDefaults";
    case ErrorCode::MultiImpactUnsupported: return "MultiImpactUnsupported";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception for everything thrown by the library. Carries a machine
/// readable code next to the human readable message.
class ContagionError : public std::runtime_error {
 public:
  ContagionError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace contagion
