#include "torusdyn/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "torusdyn/cohomology.hpp"
#include "torusdyn/error.hpp"

namespace torusdyn {
namespace {

constexpr int kNewtonMaxSteps = 100;
constexpr double kNewtonDamping = 0.5;
constexpr double kNewtonTolerance = 1e-10;

cplx unit(double turns) { return std::polar(1.0, kTwoPi * turns); }

}  // namespace

FiberTrack::FiberTrack(const Linearizer& lin, double theta) : lin_(&lin), theta_(theta) {}

double FiberTrack::angle(std::size_t j) const {
  return theta_ + static_cast<double>(j) * lin_->map().alpha();
}

const FiberTrack::Fiber& FiberTrack::at(std::size_t j) {
  while (fibers_.size() <= j) {
    const std::size_t i = fibers_.size();
    const double phi = angle(i);
    Fiber f;
    f.gamma = lin_->gamma_(phi);
    f.u = have_u_next_ ? u_next_ : lin_->u_(phi);
    const cplx u_after = lin_->u_(angle(i + 1));
    const auto t = taylor_shift(lin_->map().coefficients_at(phi), f.gamma);
    f.s.assign(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
      f.s[k] = std::exp(u_after - static_cast<double>(k) * f.u) * t[k];
    }
    f.linear_factor = lin_->data_.kappa * unit(lin_->data_.index * phi);
    fibers_.push_back(std::move(f));
    u_next_ = u_after;
    have_u_next_ = true;
  }
  return fibers_[j];
}

cplx FiberTrack::map(std::size_t j, cplx w) { return horner(at(j).s, w); }
cplx FiberTrack::map_derivative(std::size_t j, cplx w) { return horner_derivative(at(j).s, w); }
cplx FiberTrack::linear_factor(std::size_t j) { return at(j).linear_factor; }
cplx FiberTrack::u(std::size_t j) { return at(j).u; }
cplx FiberTrack::gamma(std::size_t j) { return at(j).gamma; }

KoenigsValue FiberTrack::koenigs(std::size_t j, cplx w) {
  const auto& opt = lin_->options_;
  cplx z = w, dz = 1.0, product = 1.0, previous = w;
  for (int n = 0; n < opt.max_koenigs; ++n) {
    const std::size_t at_index = j + static_cast<std::size_t>(n);
    dz *= map_derivative(at_index, z);
    z = map(at_index, z);
    product *= linear_factor(at_index);
    const cplx g = z / product;
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
      fail(ErrorCode::KoenigsStall, "Koenigs sequence diverged");
    }
    if (std::abs(g - previous) < opt.koenigs_tolerance) return {g, dz / product, n + 1};
    previous = g;
  }
  fail(ErrorCode::KoenigsStall,
       "Koenigs sequence did not settle within " + std::to_string(opt.max_koenigs) + " iterations");
}

cplx FiberTrack::koenigs_inverse(std::size_t j, cplx y) {
  const double scale = std::max(1.0, std::abs(y) / lin_->radius_);
  auto residual_at = [&](cplx w, KoenigsValue& kv) {
    try {
      kv = koenigs(j, w);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
    return std::abs(kv.value - y);
  };
  cplx w = y;
  KoenigsValue kv;
  double r = residual_at(w, kv);
  for (int it = 0; it < kNewtonMaxSteps && std::isfinite(r); ++it) {
    if (r <= 1e-15 * scale || kv.derivative == 0.0) break;
    const cplx step = (kv.value - y) / kv.derivative;
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= kNewtonDamping) {
      KoenigsValue trial;
      const double rt = residual_at(w - t * step, trial);
      if (rt < r) {
        w -= t * step;
        r = rt;
        kv = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(r < kNewtonTolerance * scale)) {
    fail(ErrorCode::NewtonFail, "inverse linearizer did not converge: residual " + std::to_string(r));
  }
  return w;
}

Linearizer Linearizer::build(const FiberedPolynomial& p, const Loop& gamma,
                             const LinearizerOptions& options) {
  Linearizer lin;
  lin.options_ = options;
  lin.map_ = std::make_shared<const FiberedPolynomial>(p);
  lin.gamma_ = gamma;
  lin.data_ = fibered_multiplier(p, gamma);
  if (!(lin.data_.lyapunov < 0.0)) {
    fail(ErrorCode::PositiveLyapunov,
         "curve is not attracting: Lyapunov exponent " + std::to_string(lin.data_.lyapunov));
  }

  // Taylor coefficients of p_theta at gamma(theta) on the grid of gamma.
  const std::size_t n = gamma.size();
  const int d = p.degree();
  std::vector<std::vector<cplx>> taylor(n);
  std::vector<cplx> linear(n);
  for (std::size_t j = 0; j < n; ++j) {
    taylor[j] = taylor_shift(p.coefficients_at(gamma.angle(j)), gamma.samples()[j]);
    linear[j] = taylor[j][1];
  }
  Loop detwisted = Loop::from_samples(linear);
  if (lin.data_.index != 0) detwisted = detwisted * fourier_mode(-lin.data_.index, n);
  const Loop log_linear = continuous_log(detwisted);
  const cplx chi = circle_mean(log_linear);
  const Loop rhs = Loop::constant(chi, n) - log_linear;
  const int k_max = options.k_max < 0 ? static_cast<int>(n / 4) : options.k_max;
  auto sol = solve_cohomological(rhs, p.rotation(), k_max);
  lin.u_ = std::move(sol.u);
  lin.cohomology_residual_ = sol.residual_sup;
  lin.data_.kappa = std::exp(chi);

  // Sup of the nonlinear part and the distance to the critical set, on the grid.
  const Loop u_next = rotate(lin.u_, p.rotation());
  double sup_b = 0.0;
  double crit = std::numeric_limits<double>::infinity();
  std::vector<cplx> probes;
  for (int i = 0; i < options.m_radii; ++i) {
    const double r = static_cast<double>(i + 1) / options.m_radii;
    for (int a = 0; a < options.m_angles; ++a) {
      probes.push_back(r * unit(static_cast<double>(a) / options.m_angles));
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const cplx uj = lin.u_.samples()[j];
    std::vector<cplx> s(static_cast<std::size_t>(d) + 1, 0.0);
    for (int k = 1; k <= d; ++k) {
      s[static_cast<std::size_t>(k)] =
          std::exp(u_next.samples()[j] - static_cast<double>(k) * uj) * taylor[j][static_cast<std::size_t>(k)];
    }
    if (d >= 2) {
      const std::vector<cplx> b(s.begin() + 2, s.end());
      for (const cplx w : probes) sup_b = std::max(sup_b, std::abs(horner(b, w)));
      std::vector<cplx> ds(static_cast<std::size_t>(d));
      for (int k = 1; k <= d; ++k) ds[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * s[static_cast<std::size_t>(k)];
      for (const cplx root : polynomial_roots(ds)) crit = std::min(crit, std::abs(root));
    }
  }
  lin.sup_b_raw_ = sup_b;
  lin.sup_b_ = sup_b * options.m_inflation;
  lin.critical_distance_ = crit;
  const double decay_term = lin.sup_b_ > 0.0
                                ? (1.0 - std::exp(lin.data_.lyapunov)) / (2.0 * lin.sup_b_)
                                : std::numeric_limits<double>::infinity();
  lin.radius_ = std::min({1.0, crit, decay_term});
  if (!(lin.radius_ > 0.0)) fail(ErrorCode::InvalidArgument, "tube radius is not positive");

  lin.measure_conjugacy();
  return lin;
}

cplx Linearizer::normalize(double theta, cplx z) const {
  return std::exp(u_(theta)) * (z - gamma_(theta));
}

cplx Linearizer::denormalize(double theta, cplx w) const {
  return gamma_(theta) + std::exp(-u_(theta)) * w;
}

bool Linearizer::in_tube(double theta, cplx z) const { return std::abs(normalize(theta, z)) < radius_; }

cplx Linearizer::evaluate(double theta, cplx z) const {
  const cplx w = normalize(theta, z);
  if (!(std::abs(w) < radius_)) {
    fail(ErrorCode::OutsideTube, "point lies outside the invariant tube");
  }
  return track(theta).koenigs(0, w).value;
}

cplx Linearizer::inverse(double theta, cplx y) const {
  auto t = track(theta);
  return denormalize(theta, t.koenigs_inverse(0, y));
}

double Linearizer::measure_conjugacy(int n_theta, int n_points) {
  const int radii = 4;
  const int angles = std::max(1, n_points / radii);
  double residual = 0.0;
  int depth = 0;
  for (int i = 0; i < n_theta; ++i) {
    auto t = track(static_cast<double>(i) / n_theta);
    for (int a = 0; a < radii; ++a) {
      const double r = 0.5 * radius_ * (0.2 + 0.25 * a);
      for (int b = 0; b < angles; ++b) {
        const cplx w = r * unit((b + 0.5 * a) / angles);
        const auto here = t.koenigs(0, w);
        const auto there = t.koenigs(1, t.map(0, w));
        residual = std::max(residual, std::abs(there.value - t.linear_factor(0) * here.value));
        depth = std::max({depth, here.depth, there.depth});
      }
    }
  }
  conj_residual_ = residual;
  koenigs_depth_ = depth;
  return residual;
}

int linearizer_index(const Linearizer& lin) {
  const Loop& gamma = lin.gamma();
  const double h = 1e-6 * lin.tube_radius();
  std::vector<cplx> d(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    const double theta = gamma.angle(j);
    auto t = lin.track(theta);
    const cplx scale = std::exp(t.u(0));
    const cplx plus = t.koenigs(0, scale * h).value;
    const cplx minus = t.koenigs(0, -scale * h).value;
    d[j] = (plus - minus) / (2.0 * h);
  }
  return winding_number(Loop::from_samples(std::move(d)));
}

double tube_contraction_ratio(const Linearizer& lin, int n_max) {
  const double c = 0.5 * (1.0 + std::exp(lin.data().lyapunov));
  const double radius = lin.tube_radius();
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    auto t = lin.track(i / 16.0);
    for (const double r : {0.25, 0.5, 0.75, 0.99}) {
      for (int a = 0; a < 8; ++a) {
        const cplx w0 = r * radius * unit(a / 8.0);
        cplx w = w0;
        double bound = std::abs(w0);
        for (int n = 0; n < n_max; ++n) {
          w = t.map(static_cast<std::size_t>(n), w);
          bound *= c;
          if (bound < 1e-280) break;
          worst = std::max(worst, std::abs(w) / bound);
        }
      }
    }
  }
  return worst;
}

}  // namespace torusdyn
