#include <cmath>
#include <random>

#include "doctest.h"
#include "torusdyn/error.hpp"
#include "torusdyn/surgery.hpp"

using namespace torusdyn;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DomainError& e) {
    return e.code();
  }
  FAIL("expected a DomainError");
  return ErrorCode::InvalidArgument;
}

cplx random_disk_point(std::mt19937_64& rng, double rmin, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmin + (rmax - rmin) * u(rng), kTwoPi * u(rng));
}

Linearizer autonomous_half() {
  const auto q = make_quadratic(Loop::constant(0.5, 64), RotationNumber::golden());
  return Linearizer::build(q, Loop::constant(0.0, 64));
}

}  // namespace

TEST_CASE("identity surgery") {
  const auto m = surgery_coefficients(0.5, 0.5);
  CHECK(m.a == cplx(1.0));
  CHECK(m.b == cplx(0.0));
  CHECK(m.dilatation == 1.0);
  CHECK(model_map(m, cplx(0.3, 0.1)) == cplx(0.3, 0.1));
  CHECK(model_beltrami(m, cplx(0.3, 0.1)) == cplx(0.0));
}

TEST_CASE("real-ray dilatation") {
  const auto m = surgery_coefficients(0.5, 0.25);
  CHECK(m.dilatation == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ray_dilatation(0.5, 0.25) == doctest::Approx(2.0).epsilon(1e-14));
  // Radial stretch z |z|^{1/K - 1} with K = Lambda0 / Lambda.
  const auto widen = surgery_coefficients(0.25, 0.5);
  const double k = std::log(0.25) / std::log(0.5);
  const cplx z(0.3, -0.2);
  CHECK(std::abs(model_map(widen, z) - z * std::pow(std::abs(z), 1.0 / k - 1.0)) < 1e-15);
}

TEST_CASE("rotated target") {
  const auto m = surgery_coefficients(0.5, std::polar(0.5, M_PI / 4));
  CHECK(std::abs(m.beltrami_ratio) < 1.0);
  const double na = std::abs(m.a), nb = std::abs(m.b);
  CHECK(m.dilatation == doctest::Approx((na + nb) / (na - nb)));
  // Off the ray rho = rho0 the ratio formula exceeds max{Lambda/Lambda0, Lambda0/Lambda} = 1.
  CHECK(m.dilatation > ray_dilatation(0.5, std::polar(0.5, M_PI / 4)));
}

TEST_CASE("coefficient properties on random multipliers") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const cplx k0 = random_disk_point(rng, 0.01, 0.99);
    const cplx k = random_disk_point(rng, 0.01, 0.99);
    const auto m = surgery_coefficients(k0, k);
    CHECK(m.a - m.b == cplx(1.0));
    CHECK(std::abs(m.beltrami_ratio) < 1.0);
    CHECK(std::abs(std::exp(2.0 * m.b * std::log(std::abs(k0))) - k / k0) < 1e-12 * std::abs(k / k0));
    // Conjugation identity phi~(kappa0 e(m theta) z) = kappa e(m theta) phi~(z).
    const int index = static_cast<int>(u(rng) * 5) - 2;
    const cplx e = std::polar(1.0, kTwoPi * index * u(rng));
    const cplx z = random_disk_point(rng, 1e-3, 1.0);
    const cplx lhs = model_map(m, k0 * e * z);
    const cplx rhs = k * e * model_map(m, z);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(model_map_inverse(m, model_map(m, z)) - z) < 1e-12);
  }
}

TEST_CASE("out-of-disk multipliers are rejected") {
  CHECK(code_of([] { surgery_coefficients(1.0, 0.5); }) == ErrorCode::OutOfDisk);
  CHECK(code_of([] { surgery_coefficients(0.5, 0.0); }) == ErrorCode::OutOfDisk);
  CHECK(code_of([] { surgery_coefficients(0.5, cplx(0.8, 0.8)); }) == ErrorCode::OutOfDisk);
}

TEST_CASE("Beltrami coefficient of the model map by finite differences") {
  const auto m = surgery_coefficients(0.5, std::polar(0.3, 1.0));
  const double h = 1e-6;
  for (const cplx z : {cplx(0.4, 0.1), cplx(-0.2, 0.5), cplx(0.05, -0.7)}) {
    const cplx dx = (model_map(m, z + h) - model_map(m, z - h)) / (2 * h);
    const cplx dy = (model_map(m, z + cplx(0, h)) - model_map(m, z - cplx(0, h))) / (2 * h);
    const cplx dz = 0.5 * (dx - cplx(0, 1) * dy);
    const cplx dzbar = 0.5 * (dx + cplx(0, 1) * dy);
    CHECK(std::abs(dzbar / dz - model_beltrami(m, z)) < 1e-4);
    CHECK(std::abs(model_beltrami(m, z)) == doctest::Approx(std::abs(model_beltrami(m, 2.0 * z))));
  }
}

TEST_CASE("tube surgery with the original multiplier is the identity") {
  const auto lin = autonomous_half();
  const auto res = tube_local_surgery(lin, 0.5);
  CHECK(res.displacement < 1e-10);
  CHECK(res.multiplier_error < 1e-6);
}

TEST_CASE("tube surgery retargets the autonomous quadratic") {
  const auto lin = autonomous_half();
  const auto shrink = tube_local_surgery(lin, 0.25);
  CHECK(shrink.measured.index == 0);
  CHECK(shrink.measured.lyapunov == doctest::Approx(std::log(0.25)).epsilon(1e-6));
  CHECK(std::abs(shrink.measured.rho) < 1e-6);
  CHECK(shrink.conjugacy_residual < 1e-8);

  const auto turn = tube_local_surgery(lin, std::polar(0.5, M_PI / 4));
  CHECK(turn.measured.rho == doctest::Approx(0.125).epsilon(1e-6));
  CHECK(turn.measured.lyapunov == doctest::Approx(std::log(0.5)).epsilon(1e-6));
}

TEST_CASE("tube surgery on a forced quadratic hits target multipliers") {
  const auto q = make_quadratic(Loop::from_modes({{0, 0.5}, {1, 0.1}}, 256), RotationNumber::golden());
  const auto lin = Linearizer::build(q, Loop::constant(0.0, 256));
  for (const cplx k : {cplx(0.25), std::polar(0.4, 1.0), std::polar(0.7, -2.0)}) {
    const auto res = tube_local_surgery(lin, k, 64);
    CHECK(res.multiplier_error < 1e-6);
    CHECK(res.invariance_residual < 1e-12);
  }
}

TEST_CASE("tube conjugacy depends holomorphically on the target") {
  const auto lin = autonomous_half();
  const double theta = 0.37;
  const cplx z = lin.denormalize(theta, cplx(0.02, 0.01));
  CHECK(kappa_holomorphy_residual(lin, theta, z, 0.05) < 1e-6);
}
