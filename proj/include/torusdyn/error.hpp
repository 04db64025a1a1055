#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace torusdyn {

/// Machine-readable failure categories raised by the numerical modules.
enum class ErrorCode {
  InvalidArgument,
  NonVanishingViolation,
  AliasingSuspected,
  NonzeroWinding,
  NonzeroMean,
  SmallDivisorBreakdown,
  VanishingLambda,
  ShapeMismatch,
  NotInvariant,
  DerivativeVanishesOnCurve,
  NonInvertibleFiber,
  NoConvergence,
  NonContinuousCriticalSet,
  PositiveLyapunov,
  KoenigsStall,
  OutsideTube,
  OutOfDisk,
  NewtonFail,
  NotInH0Star,
  LeftHyperbolicRegion,
  LoopLeavesDomain,
  EmptySet,
};

std::string_view to_string(ErrorCode code) noexcept;

/// A domain error carrying a stable code; the CLI maps it to exit status 3 and
/// the service to HTTP 422.
class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw DomainError(code, what);
}

}  // namespace torusdyn
