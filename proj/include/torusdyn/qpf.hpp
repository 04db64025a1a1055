#pragma once

#include <functional>
#include <vector>

#include "torusdyn/loop.hpp"

namespace torusdyn {

/// Index, fibered multiplier, Lyapunov exponent and fibered rotation number
/// of an invariant curve; kappa = exp(lyapunov + 2 pi i rho).
struct MultiplierData {
  int index = 0;
  cplx kappa{1.0, 0.0};
  double lyapunov = 0.0;
  double rho = 0.0;  // in (-1/2, 1/2]
};

/// A skew product (theta, z) -> (theta + alpha, f_theta(z)) given by callables
/// for the fiber map and its z-derivative.
class FiberedMap {
 public:
  using FiberFn = std::function<cplx(double, cplx)>;

  FiberedMap(double alpha, FiberFn value, FiberFn derivative)
      : alpha_(alpha), value_(std::move(value)), derivative_(std::move(derivative)) {}

  cplx operator()(double theta, cplx z) const { return value_(theta, z); }
  cplx derivative(double theta, cplx z) const { return derivative_(theta, z); }
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
  FiberFn value_;
  FiberFn derivative_;
};

/// p_theta(z) = sum_j c_j(theta) z^j over the rotation by alpha. No
/// constraint on the degree or the leading coefficient; see QpfPolynomial.
class FiberedPolynomial {
 public:
  FiberedPolynomial(std::vector<Loop> coeffs, RotationNumber alpha);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const Loop& coefficient(int j) const { return coeffs_.at(static_cast<std::size_t>(j)); }
  const std::vector<Loop>& coefficients() const noexcept { return coeffs_; }
  const RotationNumber& rotation() const noexcept { return alpha_; }
  double alpha() const noexcept { return alpha_.alpha(); }
  /// Grid of the finest coefficient loop.
  std::size_t grid_size() const noexcept;

  /// Coefficient values c_0(theta)..c_d(theta) by Fourier summation.
  std::vector<cplx> coefficients_at(double theta) const;
  cplx value(double theta, cplx z) const;
  cplx derivative(double theta, cplx z) const;

  FiberedMap as_map() const;

 private:
  std::vector<Loop> coeffs_;
  RotationNumber alpha_;
};

/// Horner evaluation of sum_j c[j] z^j and its derivative.
cplx horner(const std::vector<cplx>& c, cplx z);
cplx horner_derivative(const std::vector<cplx>& c, cplx z);
/// Coefficients of z -> sum_j c[j] (z + center)^j.
std::vector<cplx> taylor_shift(std::vector<cplx> c, cplx center);
/// All complex roots via the companion matrix; vanishing leading terms are dropped.
std::vector<cplx> polynomial_roots(std::vector<cplx> c);

/// A QPF polynomial: degree d >= 2 with a non-vanishing leading coefficient.
class QpfPolynomial : public FiberedPolynomial {
 public:
  QpfPolynomial(std::vector<Loop> coeffs, RotationNumber alpha);
};

/// H(theta, z) = (theta + nu, A(theta) z + B(theta)) with A non-vanishing;
/// eta is the winding number of A.
class FiberedAffineMap {
 public:
  FiberedAffineMap(double nu, Loop a, Loop b);

  static FiberedAffineMap identity(std::size_t n = kDefaultSamples);

  double nu() const noexcept { return nu_; }
  const Loop& scale() const noexcept { return a_; }
  const Loop& offset() const noexcept { return b_; }
  int eta() const noexcept { return eta_; }

  cplx apply(double theta, cplx z) const { return a_(theta) * z + b_(theta); }
  cplx inverse(double theta, cplx w) const { return (w - b_(theta)) / a_(theta); }

 private:
  double nu_;
  Loop a_;
  Loop b_;
  int eta_;
};

using FiberedConformalMap = FiberedAffineMap;

/// Q_lambda: z^2 + lambda(theta) z.
QpfPolynomial make_quadratic(const Loop& lambda, const RotationNumber& alpha);

struct StandardForm {
  QpfPolynomial map;           // F_c: z^2 + c(theta)
  FiberedAffineMap conjugacy;  // H(theta, z) = (theta, z + lambda(theta)/2)
  double conjugacy_residual = 0.0;
};

/// Conjugates Q_lambda to z^2 + c with c = lambda(theta + alpha)/2 - lambda^2/4.
/// Throws ShapeMismatch unless c_2 == 1 and c_0 == 0.
StandardForm to_standard_form(const QpfPolynomial& q);

/// R* = max_theta max(1, (1 + |c_{d-1}| + ... + |c_0|) / |c_d|), taken over a
/// 4x refined grid.
double escape_radius(const FiberedPolynomial& p);

inline constexpr double kOrbitOverflow = 1e150;

struct Orbit {
  std::vector<cplx> points;
  bool escaped = false;  // stopped because |z| exceeded 1e150
};

/// z_0 = z, z_{j+1} = p_{theta + j alpha}(z_j) for j < n.
Orbit iterate_fiber(const FiberedPolynomial& p, double theta, cplx z, int n);

inline constexpr double kInvarianceTolerance = 1e-8;

/// Index, multiplier, Lyapunov exponent and rotation number of an invariant
/// curve. Throws NotInvariant or DerivativeVanishesOnCurve.
MultiplierData fibered_multiplier(const FiberedMap& f, const Loop& gamma);
MultiplierData fibered_multiplier(const FiberedPolynomial& p, const Loop& gamma);

/// Multiplier data of the derivative cocycle D(theta) along a curve.
MultiplierData multiplier_from_derivative(const Loop& derivative);

/// F~ = H o F o H^{-1}: f~_phi = h_{phi - nu + alpha} o f_{phi - nu} o h_{phi - nu}^{-1}.
FiberedMap conjugate_by(const FiberedMap& f, const FiberedAffineMap& h);
/// gamma~(phi) = h_{phi - nu}(gamma(phi - nu)).
Loop transport_curve(const FiberedAffineMap& h, const Loop& gamma);

/// Forward graph transform gamma(theta + alpha) <- p_theta(gamma(theta)) until
/// the sup change drops below 1e-11. Throws NoConvergence.
Loop find_invariant_curve(const FiberedPolynomial& p, const Loop& seed, int max_iter = 5000);

/// sup_theta |p_theta(gamma(theta)) - gamma(theta + alpha)| on the grid.
double invariance_residual(const FiberedMap& f, const Loop& gamma);

/// Critical curves p'_theta(z) = 0 as continuous loops. Quadratic maps give
/// -c_1 / (2 c_2); higher degree needs globally continuous, separated roots.
std::vector<Loop> critical_curves(const FiberedPolynomial& p);

}  // namespace torusdyn
