#include <cmath>
#include <random>

#include "doctest.h"
#include "torusdyn/cohomology.hpp"
#include "torusdyn/error.hpp"

using namespace torusdyn;

namespace {

Loop random_zero_mean(std::mt19937_64& rng, int band, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::pair<int, cplx>> modes;
  for (int k = -band; k <= band; ++k) {
    if (k == 0) continue;
    const double s = std::exp(-0.5 * std::abs(k));
    modes.emplace_back(k, cplx(g(rng), g(rng)) * s);
  }
  return Loop::from_modes(modes, n);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DomainError& e) {
    return e.code();
  }
  FAIL("expected a DomainError");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("single mode solves exactly") {
  const auto alpha = RotationNumber::golden();
  const cplx d = std::polar(1.0, kTwoPi * alpha.alpha()) - 1.0;
  const Loop g = fourier_mode(1) * d;
  const auto sol = solve_cohomological(g, alpha);
  CHECK((sol.u - fourier_mode(1)).sup_norm() < 1e-14);
  CHECK(sol.residual_sup < 1e-13);
}

TEST_CASE("solution satisfies the twisted equation for random data") {
  std::mt19937_64 rng(21);
  const auto alpha = RotationNumber::golden();
  for (int trial = 0; trial < 25; ++trial) {
    const Loop g = random_zero_mean(rng, 40, 1024);
    const auto sol = solve_cohomological(g, alpha);
    CHECK(sol.residual_sup < 1e-10);
    CHECK(std::abs(circle_mean(sol.u)) < 1e-15);
    // Independent check of the equation at off-grid angles.
    for (double t : {0.1, 0.55, 0.91}) {
      CHECK(std::abs(sol.u(t + alpha.alpha()) - sol.u(t) - g(t)) < 1e-10);
    }
  }
}

TEST_CASE("nonzero mean is rejected") {
  const auto alpha = RotationNumber::golden();
  CHECK(code_of([&] { solve_cohomological(Loop::constant(1e-6), alpha); }) == ErrorCode::NonzeroMean);
  CHECK_NOTHROW(solve_cohomological(Loop::constant(1e-12), alpha));
}

TEST_CASE("rational rotation breaks down on a vanishing divisor") {
  const RotationNumber half(0.5);
  const Loop g = fourier_mode(2, 64);
  CHECK(code_of([&] { solve_cohomological(g, half, 8); }) == ErrorCode::SmallDivisorBreakdown);
}

TEST_CASE("truncation bound is validated") {
  const auto alpha = RotationNumber::golden();
  const Loop g = fourier_mode(1, 64);
  CHECK(code_of([&] { solve_cohomological(g, alpha, 33); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { solve_cohomological(g, alpha, -1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("record minima of the golden divisors are Fibonacci numbers") {
  // Oracle: brute-force record minima of |1 - e(k alpha)| computed here.
  const double alpha = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<int> oracle;
  double best = 1e9;
  for (int k = 1; k <= 64; ++k) {
    const double d = std::abs(1.0 - std::polar(1.0, kTwoPi * k * alpha));
    if (d < best) {
      best = d;
      oracle.push_back(k);
    }
  }
  const auto records = record_minima(small_divisor_profile(alpha, 64));
  CHECK(records == oracle);
  CHECK(records == std::vector<int>{1, 2, 3, 5, 8, 13, 21, 34, 55});
}

TEST_CASE("smallest divisor reports the used band") {
  const auto alpha = RotationNumber::golden();
  const Loop g = fourier_mode(3, 256) - fourier_mode(-3, 256);
  const auto sol = solve_cohomological(g, alpha, 10);
  const double expect = std::abs(1.0 - std::polar(1.0, kTwoPi * 8 * alpha.alpha()));
  CHECK(sol.smallest_divisor == doctest::Approx(expect).epsilon(1e-12));
  CHECK(sol.modes_used == 20);
}
