#pragma once

#include <memory>
#include <vector>

#include "torusdyn/qpf.hpp"

namespace torusdyn {

struct LinearizerOptions {
  int k_max = -1;               // cohomology truncation; -1 means N/4
  double m_inflation = 1.1;     // safety factor applied to the sampled sup M
  int max_koenigs = 10'000;
  double koenigs_tolerance = 1e-11;
  int m_radii = 64;
  int m_angles = 128;
};

struct KoenigsValue {
  cplx value;
  cplx derivative;
  int depth = 0;
};

class Linearizer;

/// Normalized fiber data along the orbit theta, theta + alpha, theta + 2 alpha, ...
/// extended lazily. In normalized coordinates w = e^{u(theta)} (z - gamma(theta))
/// the fiber map reads f~(w) = sum_{k>=1} s_k w^k with s_1 ~ kappa e(m theta).
class FiberTrack {
 public:
  FiberTrack(const Linearizer& lin, double theta);

  double theta() const noexcept { return theta_; }
  double angle(std::size_t j) const;

  cplx map(std::size_t j, cplx w);
  cplx map_derivative(std::size_t j, cplx w);
  /// kappa e^{2 pi i m (theta + j alpha)}.
  cplx linear_factor(std::size_t j);
  cplx u(std::size_t j);
  cplx gamma(std::size_t j);

  /// Koenigs limit at theta + j alpha, with derivative by forward mode.
  KoenigsValue koenigs(std::size_t j, cplx w);
  /// Inverse Koenigs map by damped Newton seeded with y itself.
  cplx koenigs_inverse(std::size_t j, cplx y);

 private:
  struct Fiber {
    std::vector<cplx> s;  // s[k] for k = 0..d, s[0] = 0
    cplx u;
    cplx gamma;
    cplx linear_factor;
  };
  const Fiber& at(std::size_t j);

  const Linearizer* lin_;
  double theta_;
  std::vector<Fiber> fibers_;
  cplx u_next_{};  // u at the angle after the last built fiber
  bool have_u_next_ = false;
};

/// Zero-index strong linearizer psi = Psi_2 o Psi_1 around an attracting
/// invariant curve gamma.
class Linearizer {
 public:
  static Linearizer build(const FiberedPolynomial& p, const Loop& gamma,
                          const LinearizerOptions& options = {});

  const FiberedPolynomial& map() const { return *map_; }
  const Loop& gamma() const noexcept { return gamma_; }
  const MultiplierData& data() const noexcept { return data_; }
  const Loop& u() const noexcept { return u_; }
  double tube_radius() const noexcept { return radius_; }
  double sup_nonlinear() const noexcept { return sup_b_; }  // M after inflation
  double sup_nonlinear_raw() const noexcept { return sup_b_raw_; }
  double critical_distance() const noexcept { return critical_distance_; }
  int koenigs_depth() const noexcept { return koenigs_depth_; }
  double conj_residual() const noexcept { return conj_residual_; }
  double cohomology_residual() const noexcept { return cohomology_residual_; }
  const LinearizerOptions& options() const noexcept { return options_; }

  FiberTrack track(double theta) const { return FiberTrack(*this, theta); }

  /// w = e^{u(theta)} (z - gamma(theta)) and back.
  cplx normalize(double theta, cplx z) const;
  cplx denormalize(double theta, cplx w) const;
  bool in_tube(double theta, cplx z) const;

  /// psi_theta(z); psi(gamma) = 0 and the Koenigs factor is tangent to the
  /// identity, so psi'(gamma) = e^{u(theta)}. Throws OutsideTube.
  cplx evaluate(double theta, cplx z) const;
  /// psi_theta(z) / R.
  cplx evaluate_scaled(double theta, cplx z) const { return evaluate(theta, z) / radius_; }
  /// psi_theta^{-1}(y). Throws NewtonFail.
  cplx inverse(double theta, cplx y) const;

  /// sup |Psi_2(theta + alpha, f~_theta(w)) - kappa e(m theta) Psi_2(theta, w)| over
  /// a 32 x 32 set of (theta, w) with |w| < R/2; records the depth used.
  double measure_conjugacy(int n_theta = 32, int n_points = 32);

 private:
  friend class FiberTrack;
  Linearizer() = default;

  std::shared_ptr<const FiberedPolynomial> map_;
  Loop gamma_;
  MultiplierData data_;
  Loop u_;
  double radius_ = 0.0;
  double sup_b_ = 0.0;
  double sup_b_raw_ = 0.0;
  double critical_distance_ = 0.0;
  int koenigs_depth_ = 0;
  double conj_residual_ = 0.0;
  double cohomology_residual_ = 0.0;
  LinearizerOptions options_;
};

/// Winding number of theta -> d/dz psi_theta(gamma(theta)), differentiated by a
/// central difference with step 1e-6 R.
int linearizer_index(const Linearizer& lin);

/// Largest |f~^n(w)| / (((1 + e^Lambda)/2)^n |w|) over sampled tube points and
/// n <= n_max; at most 1 when the decay bound holds.
double tube_contraction_ratio(const Linearizer& lin, int n_max = 50);

}  // namespace torusdyn
