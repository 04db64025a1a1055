#pragma once

#include <memory>

#include "torusdyn/linearization.hpp"

namespace torusdyn {

/// Coefficients of the autonomous multiplier-changing model on the linear side.
struct SurgeryModel {
  cplx kappa0;
  cplx kappa;
  cplx chi0;  // principal Log kappa0
  cplx chi;   // principal Log kappa
  cplx a;
  cplx b;     // a - b == 1 exactly
  cplx beltrami_ratio;
  double dilatation = 1.0;
};

/// a = (Log kappa + conj(Log kappa0)) / (2 log|kappa0|), b = a - 1. Throws
/// OutOfDisk unless 0 < |kappa0|, |kappa| < 1.
SurgeryModel surgery_coefficients(cplx kappa0, cplx kappa);

/// max{Lambda/Lambda0, Lambda0/Lambda}, the dilatation on the ray rho = rho0.
double ray_dilatation(cplx kappa0, cplx kappa);

/// Radial stretch z e^{2 b log|z|}, 0 at 0.
cplx model_map(const SurgeryModel& model, cplx z);
cplx model_map_inverse(const SurgeryModel& model, cplx y);
/// (b/a) z / conj(z), 0 at 0.
cplx model_beltrami(const SurgeryModel& model, cplx z);

/// Tube-local realization phi_theta = psi_theta^{-1} o phi~ o psi_theta (psi
/// rescaled to the unit disk by 1/R) and the retargeted map
/// P_kappa = Phi o P o Phi^{-1} on the tube.
class TubeSurgery {
 public:
  TubeSurgery(std::shared_ptr<const Linearizer> lin, cplx kappa);

  const SurgeryModel& model() const noexcept { return model_; }
  const Linearizer& linearizer() const noexcept { return *lin_; }

  cplx conjugacy(double theta, cplx z) const;
  cplx conjugacy_inverse(double theta, cplx z) const;
  /// P_kappa at (theta, z); z must lie in the tube.
  cplx retargeted(double theta, cplx z) const;
  /// Central difference with normalised step 1e-6 R.
  cplx retargeted_derivative(double theta, cplx z) const;
  FiberedMap as_map() const;

 private:
  cplx stretch(cplx y) const;
  cplx unstretch(cplx y) const;

  std::shared_ptr<const Linearizer> lin_;
  SurgeryModel model_;
};

struct SurgeryResult {
  SurgeryModel model;
  MultiplierData measured;
  double multiplier_error = 0.0;     // |measured kappa - target kappa|
  double invariance_residual = 0.0;  // of gamma under P_kappa
  double conjugacy_residual = 0.0;   // sup |phi(p(z)) - P_kappa(phi(z))| on samples
  double displacement = 0.0;         // sup |P_kappa(z) - p(z)| on samples
};

/// Retargets the multiplier of gamma to kappa on the tube and re-measures it on
/// a grid of `measure_points` angles. Throws OutsideTube, NewtonFail, OutOfDisk.
SurgeryResult tube_local_surgery(const Linearizer& lin, cplx kappa, std::size_t measure_points = 128);
SurgeryResult tube_local_surgery(const FiberedPolynomial& p, const Loop& gamma, cplx kappa);

/// |contour integral of kappa -> phi_{kappa,theta}(z)| over |kappa - kappa0| = radius,
/// trapezoidal with `nodes` points.
double kappa_holomorphy_residual(const Linearizer& lin, double theta, cplx z, double radius,
                                 int nodes = 32);

}  // namespace torusdyn
