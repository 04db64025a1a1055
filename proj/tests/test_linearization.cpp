#include <cmath>
#include <random>

#include "doctest.h"
#include "torusdyn/error.hpp"
#include "torusdyn/linearization.hpp"

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

FiberedPolynomial linear_fibers(const Loop& a, const RotationNumber& alpha) {
  return FiberedPolynomial({Loop::constant(0.0, a.size()), a}, alpha);
}

}  // namespace

TEST_CASE("constant linear fibers give the identity linearizer") {
  const auto alpha = RotationNumber::golden();
  const cplx k0 = std::polar(0.6, 0.4);
  const auto lin = Linearizer::build(linear_fibers(Loop::constant(k0, 128), alpha),
                                     Loop::constant(0.0, 128));
  CHECK(lin.u().sup_norm() < 1e-15);
  CHECK(lin.conj_residual() < 1e-12);
  CHECK(lin.tube_radius() == 1.0);
  for (double t : {0.0, 0.3, 0.71}) {
    const cplx z(0.3, -0.4);
    CHECK(std::abs(lin.evaluate(t, z) - z) < 1e-15);
  }
  CHECK(linearizer_index(lin) == 0);
}

TEST_CASE("coboundary linear fibers recover the transfer function") {
  // a = k0 e^{v(theta+alpha) - v(theta)} is solved by u = -v.
  const auto alpha = RotationNumber::golden();
  const std::size_t n = 256;
  const Loop v = Loop::from_modes({{1, {0.2, 0.1}}, {-1, 0.15}, {2, {0.0, -0.05}}, {-3, 0.02}}, n);
  const cplx k0 = std::polar(0.7, -1.0);
  const Loop a = (rotate(v, alpha) - v).map([&](cplx x) { return k0 * std::exp(x); });
  const auto lin = Linearizer::build(linear_fibers(a, alpha), Loop::constant(0.0, n));
  CHECK((lin.u() + v).sup_norm() < 1e-9);
  CHECK(std::abs(lin.data().kappa - k0) < 1e-12);
  for (double t : {0.05, 0.5, 0.93}) {
    const cplx z(-0.2, 0.35);
    const cplx expect = std::exp(lin.u()(t)) * z;
    CHECK(std::abs(lin.evaluate(t, z) - expect) < 1e-13);
  }
  CHECK(linearizer_index(lin) == 0);
}

TEST_CASE("tube radius of the autonomous quadratic") {
  const auto alpha = RotationNumber::golden();
  LinearizerOptions opt;
  opt.m_inflation = 1.0;
  const auto q = make_quadratic(Loop::constant(0.5, 64), alpha);
  const auto lin = Linearizer::build(q, Loop::constant(0.0, 64), opt);
  CHECK(lin.sup_nonlinear() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lin.critical_distance() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(lin.tube_radius() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(lin.conj_residual() < 1e-6);
  CHECK(linearizer_index(lin) == 0);

  CHECK(lin.evaluate(0.3, 0.0) == cplx(0.0));
  CHECK(code_of([&] { lin.evaluate(0.3, 0.25); }) == ErrorCode::OutsideTube);
  CHECK_NOTHROW(lin.evaluate(0.3, 0.2499));

  const auto inflated = Linearizer::build(q, Loop::constant(0.0, 64));
  CHECK(inflated.tube_radius() == doctest::Approx(0.5 / 2.2).epsilon(1e-14));
}

TEST_CASE("Koenigs map of the autonomous quadratic against its power series") {
  // psi(w) = w + c_2 w^2 + ... with psi(0.5 w + w^2) = 0.5 psi(w) gives c_2 = 4.
  const auto alpha = RotationNumber::golden();
  const auto q = make_quadratic(Loop::constant(0.5, 64), alpha);
  const auto lin = Linearizer::build(q, Loop::constant(0.0, 64));
  const cplx w(1e-3, 5e-4);
  const cplx psi = lin.evaluate(0.0, w);
  CHECK(std::abs(psi - (w + 4.0 * w * w)) < 50.0 * std::pow(std::abs(w), 3));
}

TEST_CASE("linearization of the three reference parameters") {
  const auto alpha = RotationNumber::golden();
  const std::vector<Loop> lambdas = {
      Loop::constant(0.5),
      Loop::from_modes({{0, 0.5}, {1, 0.1}}),
      Loop::from_modes({{0, 0.3}, {1, 0.05}, {-1, 0.05}}),
  };
  for (const auto& lambda : lambdas) {
    const auto q = make_quadratic(lambda, alpha);
    const auto lin = Linearizer::build(q, Loop::constant(0.0));
    CHECK(lin.conj_residual() < 1e-6);
    CHECK(linearizer_index(lin) == 0);
    CHECK(tube_contraction_ratio(lin) <= 1.0 + 1e-12);
    CHECK(lin.cohomology_residual() < 1e-10);
  }
}

TEST_CASE("inverse linearizer round trip") {
  const auto alpha = RotationNumber::golden();
  const auto q = make_quadratic(Loop::from_modes({{0, 0.5}, {1, 0.1}}, 256), alpha);
  const auto lin = Linearizer::build(q, Loop::constant(0.0, 256));
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double theta = u(rng);
    const cplx w = 0.5 * lin.tube_radius() * std::sqrt(u(rng)) * std::polar(1.0, kTwoPi * u(rng));
    const cplx z = lin.denormalize(theta, w);
    const cplx y = lin.evaluate(theta, z);
    CHECK(std::abs(lin.inverse(theta, y) - z) < 1e-9);
  }
}

TEST_CASE("scaled linearizer on the half tube lies in the unit disk") {
  const auto alpha = RotationNumber::golden();
  const auto q = make_quadratic(Loop::constant(0.5, 64), alpha);
  const auto lin = Linearizer::build(q, Loop::constant(0.0, 64));
  for (int a = 0; a < 64; ++a) {
    const cplx w = 0.5 * lin.tube_radius() * std::polar(0.999, kTwoPi * a / 64.0);
    CHECK(std::abs(lin.evaluate_scaled(0.1, lin.denormalize(0.1, w))) < 1.0);
  }
}

TEST_CASE("linear model carries the multiplier data") {
  // L = psi o p o psi^{-1} measured at the zero curve recovers (m, kappa).
  const auto alpha = RotationNumber::golden();
  for (const auto& lambda : {Loop::from_modes({{0, 0.5}, {1, 0.1}}, 128),
                             fourier_mode(1, 128) * cplx(0.4)}) {
    const auto q = make_quadratic(lambda, alpha);
    const auto lin = Linearizer::build(q, Loop::constant(0.0, 128));
    const double a = alpha.alpha();
    auto value = [&](double theta, cplx y) {
      return lin.evaluate(theta + a, q.value(theta, lin.inverse(theta, y)));
    };
    const double h = 1e-6 * lin.tube_radius();
    auto derivative = [&](double theta, cplx y) {
      return (value(theta, y + h) - value(theta, y - h)) / (2.0 * h);
    };
    const FiberedMap model(a, value, derivative);
    const auto measured = fibered_multiplier(model, Loop::constant(0.0, 128));
    CHECK(measured.index == lin.data().index);
    CHECK(std::abs(measured.kappa - lin.data().kappa) < 1e-9);
  }
}

TEST_CASE("linearizer preconditions") {
  const auto alpha = RotationNumber::golden();
  const auto repelling = make_quadratic(Loop::constant(3.0, 64), alpha);
  CHECK(code_of([&] { Linearizer::build(repelling, Loop::constant(0.0, 64)); }) ==
        ErrorCode::PositiveLyapunov);
  const auto q = make_quadratic(Loop::constant(0.5, 64), alpha);
  CHECK(code_of([&] { Linearizer::build(q, Loop::constant(0.2, 64)); }) == ErrorCode::NotInvariant);
}
