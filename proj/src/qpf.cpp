#include "torusdyn/qpf.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "torusdyn/error.hpp"

namespace torusdyn {
namespace {

constexpr double kVanishing = 1e-12;
constexpr double kShapeTolerance = 1e-14;
constexpr double kGraphTransformStep = 1e-11;
constexpr double kInvariantCurveResidual = 1e-9;

double refined_min_modulus(const Loop& f) { return f.refined(4).min_modulus(); }

bool is_constant(const Loop& f, cplx value) {
  for (const auto& s : f.samples()) {
    if (std::abs(s - value) > kShapeTolerance) return false;
  }
  return true;
}

}  // namespace

cplx horner(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx horner_derivative(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) acc = acc * z + static_cast<double>(j) * c[j];
  return acc;
}

std::vector<cplx> polynomial_roots(std::vector<cplx> c) {
  while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + deg);
  return roots;
}

std::vector<cplx> taylor_shift(std::vector<cplx> c, cplx center) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = n - 1; j > i; --j) c[j - 1] += center * c[j];
  }
  return c;
}

FiberedPolynomial::FiberedPolynomial(std::vector<Loop> coeffs, RotationNumber alpha)
    : coeffs_(std::move(coeffs)), alpha_(std::move(alpha)) {
  if (coeffs_.size() < 2) {
    fail(ErrorCode::InvalidArgument, "a fibered polynomial needs at least c_0 and c_1");
  }
}

std::size_t FiberedPolynomial::grid_size() const noexcept {
  std::size_t n = 0;
  for (const auto& c : coeffs_) n = std::max(n, c.size());
  return n;
}

std::vector<cplx> FiberedPolynomial::coefficients_at(double theta) const {
  std::vector<cplx> out(coeffs_.size());
  for (std::size_t j = 0; j < coeffs_.size(); ++j) out[j] = coeffs_[j](theta);
  return out;
}

cplx FiberedPolynomial::value(double theta, cplx z) const {
  return horner(coefficients_at(theta), z);
}

cplx FiberedPolynomial::derivative(double theta, cplx z) const {
  return horner_derivative(coefficients_at(theta), z);
}

FiberedMap FiberedPolynomial::as_map() const {
  auto self = std::make_shared<const FiberedPolynomial>(*this);
  return FiberedMap(
      alpha(), [self](double theta, cplx z) { return self->value(theta, z); },
      [self](double theta, cplx z) { return self->derivative(theta, z); });
}

QpfPolynomial::QpfPolynomial(std::vector<Loop> coeffs, RotationNumber alpha)
    : FiberedPolynomial(std::move(coeffs), std::move(alpha)) {
  if (degree() < 2) fail(ErrorCode::InvalidArgument, "QPF polynomials have degree >= 2");
  if (refined_min_modulus(coefficient(degree())) <= kVanishing) {
    fail(ErrorCode::InvalidArgument, "leading coefficient vanishes somewhere on the circle");
  }
}

FiberedAffineMap::FiberedAffineMap(double nu, Loop a, Loop b)
    : nu_(nu), a_(std::move(a)), b_(std::move(b)), eta_(0) {
  if (refined_min_modulus(a_) <= kVanishing) {
    fail(ErrorCode::NonInvertibleFiber, "affine fiber scale vanishes somewhere on the circle");
  }
  eta_ = winding_number(a_);
}

FiberedAffineMap FiberedAffineMap::identity(std::size_t n) {
  return FiberedAffineMap(0.0, Loop::constant(1.0, n), Loop::constant(0.0, n));
}

QpfPolynomial make_quadratic(const Loop& lambda, const RotationNumber& alpha) {
  if (refined_min_modulus(lambda) <= kVanishing) {
    fail(ErrorCode::VanishingLambda, "lambda vanishes somewhere on the circle");
  }
  const std::size_t n = lambda.size();
  return QpfPolynomial({Loop::constant(0.0, n), lambda, Loop::constant(1.0, n)}, alpha);
}

StandardForm to_standard_form(const QpfPolynomial& q) {
  if (q.degree() != 2 || !is_constant(q.coefficient(2), 1.0) || !is_constant(q.coefficient(0), 0.0)) {
    fail(ErrorCode::ShapeMismatch, "expected z^2 + lambda(theta) z");
  }
  const Loop& lambda = q.coefficient(1);
  const std::size_t n = lambda.size();
  const Loop c = rotate(lambda, q.rotation()) * 0.5 - lambda * lambda * 0.25;
  QpfPolynomial fc({c, Loop::constant(0.0, n), Loop::constant(1.0, n)}, q.rotation());
  FiberedAffineMap h(0.0, Loop::constant(1.0, n), lambda * 0.5);

  // h_{theta+alpha}(q_theta(z)) against f_{c,theta}(h_theta(z)) on a small z grid.
  const Loop half_next = rotate(h.offset(), q.rotation());
  double residual = 0.0;
  const std::vector<cplx> probes = {0.0, 0.5, {0.0, 0.5}, {-0.3, 0.2}, {1.0, -1.0}, {-1.5, 0.25}};
  for (std::size_t j = 0; j < n; ++j) {
    const cplx lam = lambda.samples()[j];
    for (const cplx z : probes) {
      const cplx lhs = z * z + lam * z + half_next.samples()[j];
      const cplx w = z + h.offset().samples()[j];
      const cplx rhs = w * w + c.samples()[j];
      residual = std::max(residual, std::abs(lhs - rhs));
    }
  }
  return StandardForm{std::move(fc), std::move(h), residual};
}

double escape_radius(const FiberedPolynomial& p) {
  const std::size_t n = 4 * p.grid_size();
  std::vector<Loop> fine;
  fine.reserve(p.coefficients().size());
  for (const auto& c : p.coefficients()) fine.push_back(c.resampled(n));
  const int d = p.degree();
  double radius = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double lower = 1.0;
    for (int i = 0; i < d; ++i) lower += std::abs(fine[static_cast<std::size_t>(i)].samples()[j]);
    const double lead = std::abs(fine[static_cast<std::size_t>(d)].samples()[j]);
    radius = std::max(radius, lower / lead);
  }
  return radius;
}

Orbit iterate_fiber(const FiberedPolynomial& p, double theta, cplx z, int n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "iteration count must be >= 0");
  Orbit orbit;
  orbit.points.reserve(static_cast<std::size_t>(n) + 1);
  orbit.points.push_back(z);
  double angle = theta;
  for (int j = 0; j < n; ++j) {
    z = p.value(angle, z);
    angle += p.alpha();
    orbit.points.push_back(z);
    if (!(std::abs(z) <= kOrbitOverflow)) {
      orbit.escaped = true;
      break;
    }
  }
  return orbit;
}

MultiplierData multiplier_from_derivative(const Loop& derivative) {
  MultiplierData out;
  out.index = winding_number(derivative);
  Loop detwisted = derivative;
  if (out.index != 0) detwisted = derivative * fourier_mode(-out.index, derivative.size());
  const cplx chi = circle_mean(continuous_log(detwisted));
  out.lyapunov = chi.real();
  out.rho = wrap_half_turn(chi.imag() / kTwoPi);
  out.kappa = std::exp(cplx(out.lyapunov, kTwoPi * out.rho));
  return out;
}

double invariance_residual(const FiberedMap& f, const Loop& gamma) {
  const Loop next = shift(gamma, f.alpha());
  double residual = 0.0;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    const cplx image = f(gamma.angle(j), gamma.samples()[j]);
    residual = std::max(residual, std::abs(image - next.samples()[j]));
  }
  return residual;
}

MultiplierData fibered_multiplier(const FiberedMap& f, const Loop& gamma) {
  const double residual = invariance_residual(f, gamma);
  if (!(residual < kInvarianceTolerance)) {
    fail(ErrorCode::NotInvariant,
         "curve is not invariant: residual " + std::to_string(residual));
  }
  std::vector<cplx> d(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    d[j] = f.derivative(gamma.angle(j), gamma.samples()[j]);
    if (std::abs(d[j]) <= kVanishing) {
      fail(ErrorCode::DerivativeVanishesOnCurve,
           "fiber derivative vanishes on the curve at theta = " + std::to_string(gamma.angle(j)));
    }
  }
  return multiplier_from_derivative(Loop::from_samples(std::move(d)));
}

MultiplierData fibered_multiplier(const FiberedPolynomial& p, const Loop& gamma) {
  return fibered_multiplier(p.as_map(), gamma);
}

FiberedMap conjugate_by(const FiberedMap& f, const FiberedAffineMap& h) {
  auto base = std::make_shared<const FiberedMap>(f);
  auto conj = std::make_shared<const FiberedAffineMap>(h);
  const double alpha = f.alpha();
  auto value = [base, conj, alpha](double phi, cplx w) {
    const double theta = phi - conj->nu();
    const cplx z = conj->inverse(theta, w);
    return conj->apply(theta + alpha, (*base)(theta, z));
  };
  auto derivative = [base, conj, alpha](double phi, cplx w) {
    const double theta = phi - conj->nu();
    const cplx z = conj->inverse(theta, w);
    return conj->scale()(theta + alpha) * base->derivative(theta, z) / conj->scale()(theta);
  };
  return FiberedMap(alpha, std::move(value), std::move(derivative));
}

Loop transport_curve(const FiberedAffineMap& h, const Loop& gamma) {
  const Loop image = h.scale() * gamma + h.offset();
  return shift(image, -h.nu());
}

Loop find_invariant_curve(const FiberedPolynomial& p, const Loop& seed, int max_iter) {
  const double radius = escape_radius(p);
  const FiberedMap f = p.as_map();
  Loop gamma = seed;
  double best_step = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<cplx> image(gamma.size());
    for (std::size_t j = 0; j < gamma.size(); ++j) {
      image[j] = p.value(gamma.angle(j), gamma.samples()[j]);
      if (!(std::abs(image[j]) <= radius)) {
        fail(ErrorCode::NoConvergence, "graph transform escaped past the escape radius at iteration " +
                                           std::to_string(it));
      }
    }
    Loop next = shift(Loop::from_samples(std::move(image)), -p.alpha());
    const double step = (next - gamma).sup_norm();
    gamma = std::move(next);
    if (step < kGraphTransformStep) {
      const double residual = invariance_residual(f, gamma);
      if (residual < kInvariantCurveResidual) return gamma;
      fail(ErrorCode::NoConvergence,
           "graph transform settled with invariance residual " + std::to_string(residual));
    }
    if (step < 0.5 * best_step) {
      best_step = step;
      since_improvement = 0;
    } else if (++since_improvement > 500) {
      fail(ErrorCode::NoConvergence, "graph transform stagnates at step size " + std::to_string(step));
    }
  }
  fail(ErrorCode::NoConvergence, "graph transform did not settle in " + std::to_string(max_iter) +
                                     " iterations");
}

std::vector<Loop> critical_curves(const FiberedPolynomial& p) {
  const std::size_t n = p.grid_size();
  if (p.degree() == 2) {
    const Loop c1 = p.coefficient(1).resampled(n);
    const Loop c2 = p.coefficient(2).resampled(n);
    if (refined_min_modulus(c2) <= kVanishing) {
      fail(ErrorCode::NonContinuousCriticalSet, "quadratic coefficient vanishes");
    }
    return {c1 / c2 * cplx(-0.5)};
  }
  if (p.degree() < 2) return {};

  // Roots of p' at each grid angle, continued by nearest-neighbour matching.
  const int roots_per_fiber = p.degree() - 1;
  std::vector<std::vector<cplx>> tracks(static_cast<std::size_t>(roots_per_fiber),
                                        std::vector<cplx>(n));
  std::vector<cplx> previous;
  auto derivative_coeffs = [&](std::size_t j) {
    const auto c = p.coefficients_at(static_cast<double>(j) / static_cast<double>(n));
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
    return d;
  };
  auto min_separation = [](const std::vector<cplx>& r) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < r.size(); ++a)
      for (std::size_t b = a + 1; b < r.size(); ++b) sep = std::min(sep, std::abs(r[a] - r[b]));
    return sep;
  };
  // Greedy matching of `roots` onto `reference` order; returns matched roots.
  auto match = [](const std::vector<cplx>& reference, std::vector<cplx> roots) {
    std::vector<cplx> out(reference.size());
    for (std::size_t a = 0; a < reference.size(); ++a) {
      auto best = std::min_element(roots.begin(), roots.end(), [&](cplx x, cplx y) {
        return std::abs(x - reference[a]) < std::abs(y - reference[a]);
      });
      out[a] = *best;
      roots.erase(best);
    }
    return out;
  };

  for (std::size_t j = 0; j < n; ++j) {
    auto roots = polynomial_roots(derivative_coeffs(j));
    if (static_cast<int>(roots.size()) != roots_per_fiber) {
      fail(ErrorCode::NonContinuousCriticalSet, "critical set changes cardinality");
    }
    const double sep = min_separation(roots);
    if (sep < 1e-8) fail(ErrorCode::NonContinuousCriticalSet, "critical points collide (branching)");
    if (!previous.empty()) {
      roots = match(previous, roots);
      for (std::size_t a = 0; a < roots.size(); ++a) {
        if (std::abs(roots[a] - previous[a]) > 0.5 * sep) {
          fail(ErrorCode::NonContinuousCriticalSet, "critical points jump between grid angles");
        }
      }
    }
    for (std::size_t a = 0; a < roots.size(); ++a) tracks[a][j] = roots[a];
    previous = roots;
  }
  // Monodromy: after one circuit each track must close up on itself.
  std::vector<cplx> first(static_cast<std::size_t>(roots_per_fiber));
  for (std::size_t a = 0; a < first.size(); ++a) first[a] = tracks[a][0];
  const auto closing = match(previous, first);
  for (std::size_t a = 0; a < first.size(); ++a) {
    if (closing[a] != tracks[a][0]) {
      fail(ErrorCode::NonContinuousCriticalSet, "critical points permute around the circle");
    }
  }
  std::vector<Loop> out;
  for (auto& t : tracks) out.push_back(Loop::from_samples(std::move(t)));
  return out;
}

}  // namespace torusdyn
