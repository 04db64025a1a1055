#include "torusdyn/surgery.hpp"

#include <algorithm>
#include <cmath>

#include "torusdyn/error.hpp"

namespace torusdyn {
namespace {

void check_disk(cplx k, const char* name) {
  const double r = std::abs(k);
  if (!(r > 0.0 && r < 1.0)) {
    fail(ErrorCode::OutOfDisk, std::string(name) + " must lie in the punctured unit disk");
  }
}

// Sample points of the normalised tube used for the residual diagnostics.
template <typename F>
void for_tube_samples(const Linearizer& lin, F&& visit) {
  const double radius = lin.tube_radius();
  for (int i = 0; i < 16; ++i) {
    const double theta = i / 16.0;
    for (const double r : {1e-4, 1e-3, 1e-2}) {
      for (int a = 0; a < 8; ++a) {
        const cplx w = r * radius * std::polar(1.0, kTwoPi * (a + 0.25 * i) / 8.0);
        visit(theta, lin.denormalize(theta, w));
      }
    }
  }
}

}  // namespace

SurgeryModel surgery_coefficients(cplx kappa0, cplx kappa) {
  check_disk(kappa0, "kappa0");
  check_disk(kappa, "kappa");
  SurgeryModel m;
  m.kappa0 = kappa0;
  m.kappa = kappa;
  m.chi0 = std::log(kappa0);
  m.chi = std::log(kappa);
  const double lambda0 = m.chi0.real();
  m.a = (m.chi + std::conj(m.chi0)) / (2.0 * lambda0);
  m.b = m.a - 1.0;
  if (m.a.real() - m.b.real() != 1.0) m.a = cplx(m.b.real() + 1.0, m.a.imag());
  m.beltrami_ratio = m.b / m.a;
  const double na = std::abs(m.a), nb = std::abs(m.b);
  m.dilatation = (na + nb) / (na - nb);
  return m;
}

double ray_dilatation(cplx kappa0, cplx kappa) {
  check_disk(kappa0, "kappa0");
  check_disk(kappa, "kappa");
  const double l0 = std::log(std::abs(kappa0)), l = std::log(std::abs(kappa));
  return std::max(l / l0, l0 / l);
}

cplx model_map(const SurgeryModel& model, cplx z) {
  if (z == 0.0) return 0.0;
  return z * std::exp(2.0 * model.b * std::log(std::abs(z)));
}

cplx model_map_inverse(const SurgeryModel& model, cplx y) {
  if (y == 0.0) return 0.0;
  // |model_map(z)| = |z|^{1 + 2 Re b} with 1 + 2 Re b > 0.
  const double log_z = std::log(std::abs(y)) / (1.0 + 2.0 * model.b.real());
  return y * std::exp(-2.0 * model.b * log_z);
}

cplx model_beltrami(const SurgeryModel& model, cplx z) {
  if (z == 0.0) return 0.0;
  return model.beltrami_ratio * z / std::conj(z);
}

TubeSurgery::TubeSurgery(std::shared_ptr<const Linearizer> lin, cplx kappa)
    : lin_(std::move(lin)), model_(surgery_coefficients(lin_->data().kappa, kappa)) {}

cplx TubeSurgery::stretch(cplx y) const {
  const double r = lin_->tube_radius();
  return r * model_map(model_, y / r);
}

cplx TubeSurgery::unstretch(cplx y) const {
  const double r = lin_->tube_radius();
  return r * model_map_inverse(model_, y / r);
}

cplx TubeSurgery::conjugacy(double theta, cplx z) const {
  auto t = lin_->track(theta);
  const cplx w = lin_->normalize(theta, z);
  if (!(std::abs(w) < lin_->tube_radius())) fail(ErrorCode::OutsideTube, "point lies outside the tube");
  const cplx image = t.koenigs_inverse(0, stretch(t.koenigs(0, w).value));
  return t.gamma(0) + std::exp(-t.u(0)) * image;
}

cplx TubeSurgery::conjugacy_inverse(double theta, cplx z) const {
  auto t = lin_->track(theta);
  const cplx w = lin_->normalize(theta, z);
  if (!(std::abs(w) < lin_->tube_radius())) fail(ErrorCode::OutsideTube, "point lies outside the tube");
  const cplx image = t.koenigs_inverse(0, unstretch(t.koenigs(0, w).value));
  return t.gamma(0) + std::exp(-t.u(0)) * image;
}

cplx TubeSurgery::retargeted(double theta, cplx z) const {
  auto t = lin_->track(theta);
  const cplx w = lin_->normalize(theta, z);
  if (!(std::abs(w) < lin_->tube_radius())) fail(ErrorCode::OutsideTube, "point lies outside the tube");
  // Phi^{-1} on the fiber at theta, the normalised map, Phi on the fiber at theta + alpha.
  const cplx back = t.koenigs_inverse(0, unstretch(t.koenigs(0, w).value));
  const cplx moved = t.map(0, back);
  const cplx forward = t.koenigs_inverse(1, stretch(t.koenigs(1, moved).value));
  return t.gamma(1) + std::exp(-t.u(1)) * forward;
}

cplx TubeSurgery::retargeted_derivative(double theta, cplx z) const {
  const double h = 1e-6 * lin_->tube_radius() / std::abs(std::exp(lin_->u()(theta)));
  return (retargeted(theta, z + h) - retargeted(theta, z - h)) / (2.0 * h);
}

FiberedMap TubeSurgery::as_map() const {
  auto self = std::make_shared<const TubeSurgery>(*this);
  return FiberedMap(
      lin_->map().alpha(), [self](double theta, cplx z) { return self->retargeted(theta, z); },
      [self](double theta, cplx z) { return self->retargeted_derivative(theta, z); });
}

SurgeryResult tube_local_surgery(const Linearizer& lin, cplx kappa, std::size_t measure_points) {
  auto shared = std::make_shared<const Linearizer>(lin);
  const TubeSurgery surgery(shared, kappa);
  SurgeryResult out;
  out.model = surgery.model();

  const Loop gamma = lin.gamma().resampled(std::min(measure_points, lin.gamma().size()));
  const FiberedMap retargeted = surgery.as_map();
  out.invariance_residual = invariance_residual(retargeted, gamma);
  out.measured = fibered_multiplier(retargeted, gamma);
  out.multiplier_error = std::abs(out.measured.kappa - kappa);

  const auto& p = lin.map();
  const double alpha = p.alpha();
  for_tube_samples(lin, [&](double theta, cplx z) {
    const cplx lhs = surgery.conjugacy(theta + alpha, p.value(theta, z));
    const cplx rhs = surgery.retargeted(theta, surgery.conjugacy(theta, z));
    out.conjugacy_residual = std::max(out.conjugacy_residual, std::abs(lhs - rhs));
    out.displacement = std::max(out.displacement, std::abs(surgery.retargeted(theta, z) - p.value(theta, z)));
  });
  return out;
}

SurgeryResult tube_local_surgery(const FiberedPolynomial& p, const Loop& gamma, cplx kappa) {
  return tube_local_surgery(Linearizer::build(p, gamma), kappa);
}

double kappa_holomorphy_residual(const Linearizer& lin, double theta, cplx z, double radius,
                                 int nodes) {
  auto shared = std::make_shared<const Linearizer>(lin);
  const cplx k0 = lin.data().kappa;
  cplx integral = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const cplx e = std::polar(1.0, kTwoPi * j / nodes);
    const TubeSurgery surgery(shared, k0 + radius * e);
    integral += surgery.conjugacy(theta, z) * cplx(0.0, radius) * e;
  }
  return std::abs(integral * (kTwoPi / nodes));
}

}  // namespace torusdyn
