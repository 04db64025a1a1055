#include <cmath>
#include <random>

#include "doctest.h"
#include "torusdyn/error.hpp"
#include "torusdyn/julia.hpp"

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

QpfPolynomial f_c(const Loop& c) {
  return QpfPolynomial({c, Loop::constant(0.0, c.size()), Loop::constant(1.0, c.size())}, RotationNumber::golden());
}

// Brute-force O(|A||B|) Hausdorff distance.
double naive_hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  auto directed = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = INFINITY;
      for (const auto& q : y) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace

TEST_CASE("filled Julia fiber examples") {
  const auto disk = fiber_filled_julia(f_c(Loop::constant(0.0)), 0.0, {}, 512, 512, 100);
  CHECK(std::abs(disk.bounded_area() - M_PI) < 0.02 * M_PI);
  CHECK(disk.escape_radius == escape_radius(f_c(Loop::constant(0.0))));

  const auto q = make_quadratic(Loop::constant(0.5), RotationNumber::golden());
  const auto fiber = fiber_filled_julia(q, 0.3, {}, 101, 101, 200);
  CHECK(fiber.at(50, 50) == 0);
  CHECK(pixel_center(fiber.bounds, 101, 101, 50, 50) == cplx(0.0, 0.0));

  const auto one = fiber_filled_julia(f_c(Loop::constant(1.0)), 0.0, {}, 101, 101, 100);
  CHECK(one.at(50, 50) >= 1);
  CHECK(one.at(50, 50) <= 20);

  CHECK(code_of([&] { fiber_filled_julia(q, 0.0, {}, 8, 8, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { fiber_filled_julia(q, 0.0, {1.0, 0.0, 0.0, 1.0}, 8, 8, 10); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("bounded pixels stay inside the escape radius") {
  const Loop lambda = Loop::from_modes({{0, 0.5}, {1, 0.1}});
  const auto q = make_quadratic(lambda, RotationNumber::golden());
  const auto r = fiber_filled_julia(q, 0.2, {}, 64, 64, 60);
  for (int j = 0; j < 64; ++j) {
    for (int i = 0; i < 64; ++i) {
      const auto orbit = iterate_fiber(q, 0.2, pixel_center(r.bounds, 64, 64, i, j), 60);
      double peak = 0.0;
      for (const auto& z : orbit.points) peak = std::max(peak, std::abs(z));
      if (r.at(i, j) == 0) {
        CHECK(std::abs(orbit.points.back()) <= r.escape_radius);
      } else {
        CHECK(peak > r.escape_radius);
      }
    }
  }
}

TEST_CASE("raising the budget never un-escapes a pixel") {
  const Loop lambda = Loop::from_modes({{0, cplx(0.6, 0.3)}, {1, 0.1}, {-1, cplx(0.0, 0.05)}});
  const auto q = make_quadratic(lambda, RotationNumber::golden());
  const auto low = fiber_filled_julia(q, 0.4, {}, 256, 256, 30);
  const auto high = fiber_filled_julia(q, 0.4, {}, 256, 256, 120);
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> pick(0, 255);
  for (int k = 0; k < 10000; ++k) {
    const int i = pick(rng), j = pick(rng);
    if (low.at(i, j) != 0) {
      CHECK(high.at(i, j) == low.at(i, j));
    }
  }
}

TEST_CASE("escape radius spot check") {
  const Loop lambda = Loop::from_modes({{0, 0.5}, {1, 0.1}, {2, cplx(0.0, 0.1)}});
  const auto q = make_quadratic(lambda, RotationNumber::golden());
  const double rs = escape_radius(q);
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double theta = u(rng);
    const cplx z0 = std::polar(rs * (2.0 + 2.0 * u(rng)), kTwoPi * u(rng));
    const auto orbit = iterate_fiber(q, theta, z0, 2);
    CHECK(std::abs(orbit.points.back()) >= 2.0 * std::abs(z0));
  }
}

TEST_CASE("Hausdorff distance") {
  CHECK(hausdorff_distance({0.0}, {0.0, 1.0}) == 1.0);
  const std::vector<cplx> a{{0.0, 0.0}, {1.0, 2.0}, {-3.0, 0.5}};
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(code_of([] { hausdorff_distance({}, {1.0}); }) == ErrorCode::EmptySet);
  CHECK(code_of([] { hausdorff_distance({1.0}, {}); }) == ErrorCode::EmptySet);

  std::mt19937_64 rng(73);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> x, y;
    const int nx = 1 + trial * 17, ny = 1 + (trial * 31) % 200;
    for (int k = 0; k < nx; ++k) x.emplace_back(g(rng), g(rng));
    for (int k = 0; k < ny; ++k) y.emplace_back(3.0 * g(rng) + 1.0, 0.2 * g(rng));
    CHECK(hausdorff_distance(x, y) == naive_hausdorff(x, y));
  }
  // Degenerate geometry: collinear and coincident points.
  std::vector<cplx> line, dup(50, cplx(2.0, 2.0));
  for (int k = 0; k < 100; ++k) line.emplace_back(0.01 * k, 0.0);
  CHECK(hausdorff_distance(line, dup) == naive_hausdorff(line, dup));
}

TEST_CASE("fibers move continuously in theta") {
  const Loop lambda = Loop::from_modes({{0, 0.5}, {1, 0.1}});
  const auto q = make_quadratic(lambda, RotationNumber::golden());
  const Rect box{-1.6, 1.6, -1.6, 1.6};
  const int res = 512;
  const double diag = std::hypot(box.x1 - box.x0, box.y1 - box.y0) / res;
  const auto base = fiber_filled_julia(q, 0.0, box, res, res, 200).bounded_points();
  std::vector<double> dist;
  for (double delta : {0.04, 0.02, 0.01}) {
    dist.push_back(hausdorff_distance(base, fiber_filled_julia(q, delta, box, res, res, 200).bounded_points()));
  }
  MESSAGE("Hausdorff probe: " << dist[0] << " " << dist[1] << " " << dist[2]);
  CHECK(dist[2] < 0.1);
  CHECK(dist[1] <= dist[0] + diag);
  CHECK(dist[2] <= dist[1] + diag);
  CHECK(dist[2] < dist[0]);
}

TEST_CASE("boundary band thins under resolution doubling") {
  const auto q = make_quadratic(Loop::constant(0.5), RotationNumber::golden());
  const double coarse = boundary_fraction(fiber_filled_julia(q, 0.0, {}, 256, 256, 200));
  const double fine = boundary_fraction(fiber_filled_julia(q, 0.0, {}, 512, 512, 200));
  CHECK(fine < 0.75 * coarse);
  CHECK(fine > 0.0);
}

TEST_CASE("constant-loop slice reproduces the classical cardioid") {
  SliceSpec spec;
  spec.window = {-1.25, 1.25, -1.25, 1.25};
  spec.width = spec.height = 25;
  const auto alpha = RotationNumber::golden();
  const auto raster = param_slice(spec, alpha);
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) {
      const cplx lam = pixel_center(spec.window, spec.width, spec.height, i, j);
      const auto& cell = raster.at(i, j);
      if (std::abs(lam) < 1e-9) {
        CHECK_FALSE(cell.valid);
        continue;
      }
      CHECK(cell.valid);
      CHECK(cell.winding == 0);
      CHECK(std::abs(*cell.kappa_hat - lam) < 1e-12);
      // Plain orbit of the critical point of z^2 + lam z.
      cplx z = -0.5 * lam;
      bool bounded = true;
      for (int n = 0; n < 500 && bounded; ++n) {
        z = z * (z + lam);
        bounded = std::abs(z) <= 1.0 + std::abs(lam);
      }
      const bool converges = bounded && std::abs(z) < 1e-6;
      CHECK(cell.member == (converges && std::abs(lam) < 1.0));
      if (std::abs(lam) < 0.9) CHECK(cell.member);
      if (std::abs(lam) > 1.1) CHECK_FALSE(cell.member);
    }
  }
  // Column 17, row 12 is lambda = 0.5.
  const auto& half = raster.at(17, 12);
  CHECK(half.member);
  CHECK(std::abs(*half.kappa_hat - 0.5) < 1e-15);

  const auto three = classify_cell(Loop::constant(3.0), alpha);
  CHECK_FALSE(three.member);
  CHECK(*three.lyapunov == doctest::Approx(std::log(3.0)));
}

TEST_CASE("slice through a winding direction") {
  SliceSpec spec;
  spec.dir2 = fourier_mode(1, 64);
  spec.window = {-1.0, 1.0, -1.0, 1.0};
  spec.width = spec.height = 16;
  const auto raster = param_slice(spec, RotationNumber::golden(), {200, 1e-6, 64});
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) {
      const cplx st = pixel_center(spec.window, 16, 16, i, j);
      const double s = st.real(), t = st.imag();
      const auto& cell = raster.at(i, j);
      if (std::abs(std::abs(s) - std::abs(t)) < 1e-9) continue;  // lambda touches 0
      CHECK(cell.valid);
      if (std::abs(t) > std::abs(s)) {
        CHECK(cell.winding == 1);
        CHECK_FALSE(cell.kappa_hat.has_value());
        CHECK_FALSE(cell.member);
      } else {
        CHECK(cell.winding == 0);
        REQUIRE(cell.kappa_hat.has_value());
        // Spectral error of the log-mean decays like |t/s|^64.
        if (std::abs(t) < 0.6 * std::abs(s)) CHECK(std::abs(*cell.kappa_hat - s) < 1e-10);
      }
    }
  }
}

TEST_CASE("slices are deterministic") {
  SliceSpec spec;
  spec.base = Loop::from_modes({{0, 0.2}, {2, 0.1}}, 64);
  spec.dir2 = fourier_mode(-1, 64);
  spec.width = spec.height = 12;
  const MembershipOptions opt{150, 1e-6, 32};
  const auto a = param_slice(spec, RotationNumber::golden(), opt);
  const auto b = param_slice(spec, RotationNumber::golden(), opt);
  for (std::size_t k = 0; k < a.cells.size(); ++k) {
    CHECK(a.cells[k].member == b.cells[k].member);
    CHECK(a.cells[k].escape_iteration == b.cells[k].escape_iteration);
    CHECK(a.cells[k].kappa_hat == b.cells[k].kappa_hat);
  }
}
