#include "torusdyn/error.hpp"

namespace torusdyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonVanishingViolation: return "NonVanishingViolation";
    case ErrorCode::AliasingSuspected: return "AliasingSuspected";
    case ErrorCode::NonzeroWinding: return "NonzeroWinding";
    case ErrorCode::NonzeroMean: return "NonzeroMean";
    case ErrorCode::SmallDivisorBreakdown: return "SmallDivisorBreakdown";
    case ErrorCode::VanishingLambda: return "VanishingLambda";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::DerivativeVanishesOnCurve: return "DerivativeVanishesOnCurve";
    case ErrorCode::NonInvertibleFiber: return "NonInvertibleFiber";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonContinuousCriticalSet: return "NonContinuousCriticalSet";
    case ErrorCode::PositiveLyapunov: return "PositiveLyapunov";
    case ErrorCode::KoenigsStall: return "KoenigsStall";
    case ErrorCode::OutsideTube: return "OutsideTube";
    case ErrorCode::OutOfDisk: return "OutOfDisk";
    case ErrorCode::NewtonFail: return "NewtonFail";
    case ErrorCode::NotInH0Star: return "NotInH0Star";
    case ErrorCode::LeftHyperbolicRegion: return "LeftHyperbolicRegion";
    case ErrorCode::LoopLeavesDomain: return "LoopLeavesDomain";
    case ErrorCode::EmptySet: return "EmptySet";
  }
  return "Unknown";
}

}  // namespace torusdyn
