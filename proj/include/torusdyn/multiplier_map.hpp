#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torusdyn/loop.hpp"

namespace torusdyn {

/// chi^(lambda) = mean of the continuous log of lambda; Re chi^ is the
/// Lyapunov exponent of gamma = 0 for z^2 + lambda z. Throws VanishingLambda,
/// NonzeroWinding.
cplx chi_hat(const Loop& lambda);
/// kappa^(lambda) = exp chi^(lambda).
cplx kappa_hat(const Loop& lambda);

/// |kappa^(c lambda) - c kappa^(lambda)|.
double scaling_identity_check(const Loop& lambda, cplx c);

/// D kappa^(lambda)[v] = kappa^(lambda) mean(v / lambda).
cplx directional_derivative(const Loop& lambda, const Loop& v);

struct HolomorphyCheck {
  double residual = 0.0;          // 16-node trapezoid of the contour integral
  double refined_residual = 0.0;  // same with 32 nodes
  bool verdicts_agree = true;     // both below or both above 1e-8 radius
};

/// |contour integral of kappa^(lambda + t v) dt| over |t| = radius. Throws
/// LoopLeavesDomain when lambda + t v vanishes or winds on the contour.
HolomorphyCheck holomorphy_residual(const Loop& lambda, const Loop& v, double radius);

struct MembershipOptions {
  int n_iter = 500;
  double converge_threshold = 1e-6;
  std::size_t fiber_angles = 256;
};

struct MembershipReport {
  int winding = 0;
  std::optional<double> lyapunov;
  std::optional<cplx> kappa_hat;
  bool critical_orbit_bounded = false;
  bool critical_orbit_converges_to_zero = false;
  bool in_h0star = false;
  int escape_iteration = 0;  // first n with |z_n| > R* on some fiber, 0 if never
  double escape_radius = 0.0;
  double final_max_modulus = 0.0;
  std::vector<std::string> diagnostics;
};

/// Values lambda(theta_i + n alpha) for i < m fiber angles and n <= steps.
class LambdaTable {
 public:
  LambdaTable(const Loop& lambda, double alpha, std::size_t angles, int steps);
  std::size_t angles() const noexcept { return angles_; }
  int steps() const noexcept { return steps_; }
  const cplx* row(int n) const { return values_.data() + static_cast<std::size_t>(n) * angles_; }

 private:
  std::size_t angles_;
  int steps_;
  std::vector<cplx> values_;
};

struct CriticalOrbitScan {
  bool bounded = true;
  bool converges = false;
  int escape_iteration = 0;
  double final_max_modulus = 0.0;
};

/// Iterates the critical curve -lambda/2 of z^2 + lambda z on the table's
/// fiber angles, with lambda = sum_k weights[k] tables[k].
CriticalOrbitScan scan_critical_orbit(const std::vector<const LambdaTable*>& tables,
                                      const std::vector<cplx>& weights, double escape_radius,
                                      int n_iter, double converge_threshold);

/// Membership of Q_lambda in the zero-winding hyperbolic region: winding 0,
/// Lyapunov exponent < 0 and the critical orbit converging to gamma = 0.
/// Throws VanishingLambda.
MembershipReport membership_h0star(const Loop& lambda, const RotationNumber& alpha,
                                   const MembershipOptions& options = {});

/// lambda_kappa = (kappa / kappa^(lambda*)) lambda*. Throws NotInH0Star when
/// lambda* fails membership and LeftHyperbolicRegion when lambda_kappa does.
Loop scaling_section(const Loop& lambda_star, cplx kappa, const RotationNumber& alpha,
                     const MembershipOptions& options = {});

}  // namespace torusdyn
