#include <cmath>
#include <random>

#include "doctest.h"
#include "torusdyn/error.hpp"
#include "torusdyn/loop.hpp"

using namespace torusdyn;

namespace {

cplx random_cplx(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

Loop random_trig(std::mt19937_64& rng, int band, double decay, std::size_t n) {
  std::vector<std::pair<int, cplx>> modes;
  for (int k = -band; k <= band; ++k) {
    modes.emplace_back(k, random_cplx(rng, std::pow(decay, std::abs(k))));
  }
  return Loop::from_modes(modes, n);
}

// Direct O(N^2) DFT used as an oracle for the FFT backing.
std::vector<cplx> naive_dft(std::span<const cplx> x) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += x[j] * std::polar(1.0, -kTwoPi * static_cast<double>(j * k % n) / static_cast<double>(n));
    }
    out[k] = acc / static_cast<double>(n);
  }
  return out;
}

}  // namespace

TEST_CASE("coefficients agree with a direct DFT") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {8u, 32u, 128u}) {
    std::vector<cplx> s(n);
    for (auto& v : s) v = random_cplx(rng, 1.0);
    const Loop f = Loop::from_samples(s);
    const auto oracle = naive_dft(s);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(f.coefficients()[k] - oracle[k]) < 1e-13);
  }
}

TEST_CASE("samples and coefficients round trip") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> s(256);
    for (auto& v : s) v = random_cplx(rng, 3.0);
    const Loop f = Loop::from_samples(s);
    const Loop g = Loop::from_coefficients({f.coefficients().begin(), f.coefficients().end()});
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(g.samples()[j] - s[j]) < 1e-13);
  }
}

TEST_CASE("grid size must be a power of two and at least 8") {
  CHECK_THROWS_AS(Loop::from_samples(std::vector<cplx>(12)), DomainError);
  CHECK_THROWS_AS(Loop::from_samples(std::vector<cplx>(4)), DomainError);
  CHECK_NOTHROW(Loop::from_samples(std::vector<cplx>(8)));
}

TEST_CASE("off-grid evaluation is the Fourier sum") {
  const Loop f = Loop::from_modes({{0, 1.0}, {1, {0.5, 0.25}}, {-3, 0.125}}, 64);
  for (double t : {0.013, 0.37, 0.5001, 0.99}) {
    const cplx expect = 1.0 + cplx(0.5, 0.25) * std::polar(1.0, kTwoPi * t) +
                        0.125 * std::polar(1.0, -3 * kTwoPi * t);
    CHECK(std::abs(f(t) - expect) < 1e-14);
  }
  CHECK(f(3.0 / 64.0) == f.samples()[3]);
  CHECK(f(-1.0 / 64.0) == f.samples()[63]);
}

TEST_CASE("shift is a spectral rotation") {
  std::mt19937_64 rng(13);
  const Loop f = random_trig(rng, 10, 0.6, 128);
  const double s = 0.2718281828;
  const Loop g = shift(f, s);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(g.samples()[j] - f(g.angle(j) + s)) < 1e-12);
  const Loop back = shift(g, -s);
  CHECK((back - f).sup_norm() < 1e-13);
}

TEST_CASE("winding number of simple loops") {
  CHECK(winding_number(Loop::constant(2.0)) == 0);
  CHECK(winding_number(fourier_mode(1)) == 1);
  CHECK(winding_number(fourier_mode(-3)) == -3);
  // 3 + e(theta) stays away from zero.
  CHECK(winding_number(Loop::from_modes({{0, 3.0}, {1, 1.0}}, 4096)) == 0);
  // 0.5 + e(theta) winds once.
  CHECK(winding_number(Loop::from_modes({{0, 0.5}, {1, 1.0}}, 64)) == 1);
  CHECK_THROWS_AS(winding_number(Loop::from_modes({{0, 1.0}, {1, 1.0}}, 64)), DomainError);
}

TEST_CASE("winding number is additive under products") {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> deg(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const int m1 = deg(rng), m2 = deg(rng);
    auto make = [&](int m) {
      Loop f = fourier_mode(m, 256) * (Loop::constant(1.0, 256) + random_trig(rng, 3, 0.5, 256) * 0.1);
      return f;
    };
    const Loop f = make(m1), g = make(m2);
    CHECK(winding_number(f) == m1);
    CHECK(winding_number(f * g) == m1 + m2);
    CHECK(winding_number(f / g) == m1 - m2);
  }
}

TEST_CASE("continuous log exponentiates back and fixes the branch") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Loop f = Loop::constant(std::polar(2.0, 3.0), 256) + random_trig(rng, 4, 0.5, 256) * 0.2;
    const Loop l = continuous_log(f);
    CHECK(std::abs(l.samples()[0].imag()) <= M_PI);
    const Loop back = l.map([](cplx z) { return std::exp(z); });
    CHECK((back - f).sup_norm() < 1e-12 * f.sup_norm());
  }
  CHECK_THROWS_AS(continuous_log(fourier_mode(1)), DomainError);
}

TEST_CASE("mean of log(a + b e(theta)) equals log a for |b| < |a|") {
  // Jensen: the mean of log|a + b w| over the unit circle is log|a| when |b| < |a|.
  const cplx a(1.5, -0.7), b(0.4, 0.9);
  const Loop f = Loop::from_modes({{0, a}, {1, b}}, 512);
  const cplx mean = circle_mean(continuous_log(f));
  CHECK(std::abs(mean - std::log(a)) < 1e-13);
}

TEST_CASE("resampling preserves band-limited loops") {
  std::mt19937_64 rng(16);
  const Loop f = random_trig(rng, 5, 0.7, 32);
  const Loop g = f.resampled(256).resampled(32);
  CHECK((g - f).sup_norm() < 1e-13);
  const Loop fine = f.refined(4);
  for (double t : {0.1, 0.33, 0.77}) CHECK(std::abs(fine(t) - f(t)) < 1e-13);
}

TEST_CASE("values on a shifted grid") {
  std::mt19937_64 rng(17);
  const Loop f = random_trig(rng, 6, 0.5, 64);
  const double s = 0.123456;
  for (std::size_t m : {16u, 64u, 256u}) {
    const auto v = f.values_on_grid(m, s);
    for (std::size_t i = 0; i < m; i += 3) {
      CHECK(std::abs(v[i] - f(static_cast<double>(i) / static_cast<double>(m) + s)) < 1e-12);
    }
  }
}

TEST_CASE("continued fraction of the golden mean") {
  const auto g = RotationNumber::golden();
  const auto& a = g.partial_quotients();
  REQUIRE(a.size() > 20);
  CHECK(a[0] == 0);
  for (std::size_t i = 1; i + 1 < 25 && i < a.size(); ++i) CHECK(a[i] == 1);
  CHECK(g.convergents()[0].p == 0);
  CHECK(g.convergents()[0].q == 1);
  long long f0 = 1, f1 = 1;
  for (const auto& c : g.convergents().subspan(1)) {
    CHECK(c.q == f1);
    CHECK(c.p == f0);
    const long long next = f0 + f1;
    f0 = f1;
    f1 = next;
  }
  CHECK(g.tau() >= 2.0);
  CHECK(g.delta() > 0.0);
}

TEST_CASE("Diophantine pair bounds every convergent") {
  for (const auto& r : {RotationNumber::golden(), RotationNumber::named("silver"),
                        RotationNumber(0.1234567891), RotationNumber(M_PI - 3.0)}) {
    for (const auto& c : r.convergents()) {
      if (c.q < 1) continue;
      const double dist = std::abs(r.alpha() - static_cast<double>(c.p) / static_cast<double>(c.q));
      CHECK(dist > r.delta() / std::pow(static_cast<double>(c.q), r.tau()));
    }
  }
}

TEST_CASE("convergents are best approximations") {
  const RotationNumber r(0.4142135623730951);
  for (const auto& c : r.convergents()) {
    if (c.q > 2000) break;
    const double best = std::abs(c.q * r.alpha() - static_cast<double>(c.p));
    for (long long q = 1; q < c.q; ++q) {
      const double d = std::abs(q * r.alpha() - std::round(q * r.alpha()));
      CHECK(d > best - 1e-12);
    }
  }
}

TEST_CASE("rotation number argument checks") {
  CHECK_THROWS_AS(RotationNumber(0.0), DomainError);
  CHECK_THROWS_AS(RotationNumber(1.5), DomainError);
  CHECK_THROWS_AS(RotationNumber::named("bronze-ish"), DomainError);
}

TEST_CASE("wrap and circle distance") {
  CHECK(wrap_half_turn(0.5) == doctest::Approx(0.5));
  CHECK(wrap_half_turn(-0.5) == doctest::Approx(0.5));
  CHECK(wrap_half_turn(0.75) == doctest::Approx(-0.25));
  CHECK(circle_distance(0.95, 0.05) == doctest::Approx(0.1));
}
