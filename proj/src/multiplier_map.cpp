#include "torusdyn/multiplier_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "torusdyn/error.hpp"
#include "torusdyn/qpf.hpp"

namespace torusdyn {
namespace {

constexpr double kVanishing = 1e-12;

void require_non_vanishing(const Loop& lambda) {
  if (lambda.refined(4).min_modulus() <= kVanishing) {
    fail(ErrorCode::VanishingLambda, "lambda vanishes somewhere on the circle");
  }
}

bool admissible(const Loop& lambda) {
  const Loop fine = lambda.refined(4);
  if (fine.min_modulus() <= kVanishing) return false;
  try {
    return winding_number(lambda) == 0;
  } catch (const DomainError&) {
    return false;
  }
}

double contour_integral(const Loop& lambda, const Loop& v, double radius, int nodes) {
  cplx sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const cplx t = radius * std::polar(1.0, kTwoPi * j / nodes);
    sum += kappa_hat(lambda + v * t) * cplx(0.0, 1.0) * t;
  }
  return std::abs(sum * (kTwoPi / nodes));
}

}  // namespace

cplx chi_hat(const Loop& lambda) {
  require_non_vanishing(lambda);
  const int w = winding_number(lambda);
  if (w != 0) {
    fail(ErrorCode::NonzeroWinding, "lambda has winding number " + std::to_string(w));
  }
  return circle_mean(continuous_log(lambda));
}

cplx kappa_hat(const Loop& lambda) { return std::exp(chi_hat(lambda)); }

double scaling_identity_check(const Loop& lambda, cplx c) {
  return std::abs(kappa_hat(lambda * c) - c * kappa_hat(lambda));
}

cplx directional_derivative(const Loop& lambda, const Loop& v) {
  const cplx k = kappa_hat(lambda);
  return k * circle_mean(v / lambda);
}

HolomorphyCheck holomorphy_residual(const Loop& lambda, const Loop& v, double radius) {
  if (!(radius >= 0.0)) fail(ErrorCode::InvalidArgument, "contour radius must be >= 0");
  for (int j = 0; j < 64; ++j) {
    const cplx t = radius * std::polar(1.0, kTwoPi * j / 64.0);
    if (!admissible(lambda + v * t)) {
      fail(ErrorCode::LoopLeavesDomain,
           "lambda + t v leaves the non-vanishing zero-winding loops on |t| = " + std::to_string(radius));
    }
  }
  HolomorphyCheck out;
  // A zero direction makes the integrand constant; its contour integral is exactly 0.
  if (v.sup_norm() == 0.0 || radius == 0.0) return out;
  out.residual = contour_integral(lambda, v, radius, 16);
  out.refined_residual = contour_integral(lambda, v, radius, 32);
  const double bar = 1e-8 * radius;
  out.verdicts_agree = (out.residual < bar) == (out.refined_residual < bar);
  return out;
}

LambdaTable::LambdaTable(const Loop& lambda, double alpha, std::size_t angles, int steps)
    : angles_(angles), steps_(steps) {
  if (angles == 0 || !std::has_single_bit(angles)) {
    fail(ErrorCode::InvalidArgument, "fiber angle count must be a power of two");
  }
  if (steps < 1) fail(ErrorCode::InvalidArgument, "iteration count must be >= 1");
  values_.reserve(angles * static_cast<std::size_t>(steps));
  for (int n = 0; n < steps; ++n) {
    const double s = n * alpha;
    const auto row = lambda.values_on_grid(angles, s - std::floor(s));
    values_.insert(values_.end(), row.begin(), row.end());
  }
}

CriticalOrbitScan scan_critical_orbit(const std::vector<const LambdaTable*>& tables,
                                      const std::vector<cplx>& weights, double escape_radius,
                                      int n_iter, double converge_threshold) {
  if (tables.empty() || tables.size() != weights.size()) {
    fail(ErrorCode::InvalidArgument, "tables and weights must match");
  }
  const std::size_t m = tables.front()->angles();
  for (const auto* t : tables) {
    if (t->angles() != m || t->steps() < n_iter) {
      fail(ErrorCode::InvalidArgument, "lambda tables do not cover the requested orbit");
    }
  }
  // |lambda| <= R* - 1 everywhere, which bounds growth near 0.
  const double lambda_bound = std::max(0.0, escape_radius - 1.0);

  std::vector<cplx> lam(m), z(m);
  auto load_row = [&](int n) {
    std::fill(lam.begin(), lam.end(), cplx(0.0));
    for (std::size_t k = 0; k < tables.size(); ++k) {
      if (weights[k] == 0.0) continue;
      const cplx* row = tables[k]->row(n);
      for (std::size_t i = 0; i < m; ++i) lam[i] += weights[k] * row[i];
    }
  };
  load_row(0);
  for (std::size_t i = 0; i < m; ++i) z[i] = -0.5 * lam[i];

  CriticalOrbitScan out;
  double max_mod = 0.0;
  for (int n = 0; n < n_iter; ++n) {
    if (n > 0) load_row(n);
    max_mod = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = z[i] * (z[i] + lam[i]);
      max_mod = std::max(max_mod, std::abs(z[i]));
    }
    if (!(max_mod <= escape_radius)) {
      out.bounded = false;
      out.converges = false;
      out.escape_iteration = n + 1;
      out.final_max_modulus = max_mod;
      return out;
    }
    if (max_mod < converge_threshold) {
      // |z'| <= |z| (|z| + |lambda|): if the remaining steps cannot lift the
      // orbit back above the threshold, the outcome is already decided.
      double bound = max_mod;
      bool settled = true;
      for (int k = n + 1; k < n_iter; ++k) {
        bound *= bound + lambda_bound;
        if (bound >= converge_threshold) {
          settled = false;
          break;
        }
        if (bound < 1e-300) break;
      }
      if (settled) {
        out.converges = true;
        out.final_max_modulus = max_mod;
        return out;
      }
    }
  }
  out.final_max_modulus = max_mod;
  out.converges = max_mod < converge_threshold;
  return out;
}

MembershipReport membership_h0star(const Loop& lambda, const RotationNumber& alpha,
                                   const MembershipOptions& options) {
  require_non_vanishing(lambda);
  MembershipReport r;
  r.winding = winding_number(lambda);
  if (r.winding == 0) {
    const cplx chi = circle_mean(continuous_log(lambda));
    r.lyapunov = chi.real();
    r.kappa_hat = std::exp(chi);
  } else {
    r.diagnostics.push_back("nonzero winding: Lyapunov data of gamma = 0 left undefined");
  }
  r.escape_radius = escape_radius(make_quadratic(lambda, alpha));
  const LambdaTable table(lambda, alpha.alpha(), options.fiber_angles, options.n_iter);
  const auto scan = scan_critical_orbit({&table}, {cplx(1.0)}, r.escape_radius, options.n_iter,
                                        options.converge_threshold);
  r.critical_orbit_bounded = scan.bounded;
  r.critical_orbit_converges_to_zero = scan.converges;
  r.escape_iteration = scan.escape_iteration;
  r.final_max_modulus = scan.final_max_modulus;
  r.in_h0star = r.winding == 0 && r.lyapunov.value_or(0.0) < 0.0 && scan.bounded && scan.converges;
  if (r.winding == 0 && !(*r.lyapunov < 0.0)) r.diagnostics.push_back("gamma = 0 is not attracting");
  if (!scan.bounded) r.diagnostics.push_back("critical orbit escapes");
  else if (!scan.converges) r.diagnostics.push_back("critical orbit bounded but not converging to 0");
  r.diagnostics.push_back("hyperbolicity inferred from critical-orbit convergence, not certified");
  return r;
}

Loop scaling_section(const Loop& lambda_star, cplx kappa, const RotationNumber& alpha,
                     const MembershipOptions& options) {
  const auto base = membership_h0star(lambda_star, alpha, options);
  if (!base.in_h0star) fail(ErrorCode::NotInH0Star, "base parameter is not in the hyperbolic region");
  const cplx scale = kappa / *base.kappa_hat;
  Loop out = lambda_star * scale;
  if (!admissible(out) || !membership_h0star(out, alpha, options).in_h0star) {
    fail(ErrorCode::LeftHyperbolicRegion, "scaled parameter leaves the hyperbolic region");
  }
  return out;
}

}  // namespace torusdyn
