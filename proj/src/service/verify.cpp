#include "torusdyn/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <latch>
#include <random>
#include <thread>

#include "torusdyn/cache.hpp"
#include "torusdyn/cohomology.hpp"
#include "torusdyn/error.hpp"
#include "torusdyn/julia.hpp"
#include "torusdyn/linearization.hpp"
#include "torusdyn/multiplier_map.hpp"
#include "torusdyn/surgery.hpp"

namespace torusdyn {
namespace {

using Clock = std::chrono::steady_clock;

cplx gauss(std::mt19937_64& rng, double s) {
  std::normal_distribution<double> g(0.0, s);
  return {g(rng), g(rng)};
}

double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// r e(m theta) (1 + small trigonometric part).
Loop random_lambda(std::mt19937_64& rng, double r, int m, std::size_t n) {
  std::vector<std::pair<int, cplx>> modes{{0, 1.0}};
  for (int k = -3; k <= 3; ++k) {
    if (k != 0) modes.emplace_back(k, gauss(rng, 0.03));
  }
  return fourier_mode(m, n) * Loop::from_modes(modes, n) * cplx(r);
}

Loop random_member(std::mt19937_64& rng, std::size_t n = 256) {
  return random_lambda(rng, 0.2 + 0.4 * uniform(rng), 0, n) * std::polar(1.0, kTwoPi * uniform(rng));
}

Loop random_direction(std::mt19937_64& rng, std::size_t n = 256) {
  std::vector<std::pair<int, cplx>> modes;
  for (int k = -4; k <= 4; ++k) modes.emplace_back(k, gauss(rng, 1.0 / (1 + std::abs(k))));
  return Loop::from_modes(modes, n);
}

template <class F>
ErrorCode thrown_code(F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

CriterionResult conjugacy_law() {
  CriterionResult r{1, "conjugacy-law"};
  std::mt19937_64 rng(1001);
  const auto alpha = RotationNumber::golden();
  bool index_ok = true;
  double lyap_err = 0.0, rho_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int m = trial % 3 - 1;
    const int eta = (trial / 3) % 3 - 1;
    const auto q = make_quadratic(random_lambda(rng, uniform(rng, 0.3, 0.9), m, 256), alpha);
    const auto f = q.as_map();
    const auto before = fibered_multiplier(f, Loop::constant(0.0, 256));
    const Loop a = fourier_mode(eta, 256) * random_lambda(rng, uniform(rng, 0.5, 2.0), 0, 256);
    const Loop b = random_lambda(rng, uniform(rng, 0.0, 0.5), 0, 256) * std::polar(1.0, kTwoPi * uniform(rng));
    const FiberedAffineMap h(uniform(rng), a, b);
    const auto after = fibered_multiplier(conjugate_by(f, h), transport_curve(h, Loop::constant(0.0, 256)));
    index_ok = index_ok && after.index == before.index;
    lyap_err = std::max(lyap_err, std::abs(after.lyapunov - before.lyapunov));
    rho_err = std::max(rho_err, circle_distance(after.rho, before.rho + h.eta() * alpha.alpha() - before.index * h.nu()));
  }
  r.measured = {{"trials", 50}, {"index_preserved", index_ok}, {"max_lyapunov_error", lyap_err},
                {"max_rho_error", rho_err}};
  r.pass = index_ok && lyap_err < 1e-9 && rho_err < 1e-8;
  return r;
}

CriterionResult cohomology_solver() {
  CriterionResult r{2, "cohomological-solver"};
  std::mt19937_64 rng(1002);
  const auto alpha = RotationNumber::golden();
  double worst = 0.0;
  int mean_rejections = 0, mean_trials = 0;
  bool small_mean_accepted = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<int, cplx>> modes;
    for (int k = -64; k <= 64; ++k) {
      if (k != 0) modes.emplace_back(k, gauss(rng, std::exp(-0.05 * std::abs(k))));
    }
    const Loop g = Loop::from_modes(modes, 1024);
    worst = std::max(worst, solve_cohomological(g, alpha).residual_sup);

    const double mag = std::pow(10.0, uniform(rng, -10.0, 0.0));
    const cplx c = std::polar(mag, kTwoPi * uniform(rng));
    ++mean_trials;
    if (thrown_code([&] { solve_cohomological(g + c, alpha); }) == ErrorCode::NonzeroMean) ++mean_rejections;
    if (trial % 10 == 0) {
      const cplx tiny = std::polar(1e-12, kTwoPi * uniform(rng));
      small_mean_accepted = small_mean_accepted &&
                            thrown_code([&] { solve_cohomological(g + tiny, alpha); }) == static_cast<ErrorCode>(-1);
    }
  }
  r.measured = {{"trials", 100}, {"max_residual", worst}, {"nonzero_mean_raised", mean_rejections},
                {"nonzero_mean_cases", mean_trials}, {"tiny_mean_accepted", small_mean_accepted}};
  r.pass = worst < 1e-8 && mean_rejections == mean_trials && small_mean_accepted;
  return r;
}

CriterionResult linearization() {
  CriterionResult r{3, "linearization"};
  const auto alpha = RotationNumber::golden();
  const std::vector<std::pair<std::string, Loop>> cases = {
      {"0.5", Loop::constant(0.5)},
      {"0.5+0.1e", Loop::from_modes({{0, 0.5}, {1, 0.1}})},
      {"0.3+0.05e+0.05e^-1", Loop::from_modes({{0, 0.3}, {1, 0.05}, {-1, 0.05}})},
  };
  r.pass = true;
  r.measured = json::array();
  for (const auto& [name, lambda] : cases) {
    const auto lin = Linearizer::build(make_quadratic(lambda, alpha), Loop::constant(0.0));
    const int index = linearizer_index(lin);
    r.measured.push_back({{"lambda", name}, {"conj_residual", lin.conj_residual()}, {"index", index},
                          {"R", lin.tube_radius()}, {"koenigs_depth", lin.koenigs_depth()}});
    r.pass = r.pass && lin.conj_residual() < 1e-6 && index == 0;
  }
  return r;
}

CriterionResult surgery() {
  CriterionResult r{4, "surgery-model"};
  std::mt19937_64 rng(1004);
  auto disk_point = [&](double lo, double hi) { return std::polar(uniform(rng, lo, hi), kTwoPi * uniform(rng)); };
  bool exact = true;
  double identity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const cplx k0 = disk_point(0.01, 0.99), k = disk_point(0.01, 0.99);
    const auto m = surgery_coefficients(k0, k);
    exact = exact && (m.a - m.b == cplx(1.0));
    const int index = static_cast<int>(uniform(rng) * 5) - 2;
    const cplx e = std::polar(1.0, kTwoPi * index * uniform(rng));
    const cplx z = disk_point(1e-3, 1.0);
    identity = std::max(identity, std::abs(model_map(m, k0 * e * z) - k * e * model_map(m, z)));
  }

  const auto q = make_quadratic(Loop::from_modes({{0, 0.5}, {1, 0.1}}, 256), RotationNumber::golden());
  const auto lin = Linearizer::build(q, Loop::constant(0.0, 256));
  double hit = 0.0;
  for (int j = 0; j < 8; ++j) {
    const cplx target = std::polar(0.2 + 0.08 * j, kTwoPi * (j - 3.5) / 9.0);
    hit = std::max(hit, tube_local_surgery(lin, target, 64).multiplier_error);
  }
  double holo = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double theta = 0.1 + 0.23 * j;
    const cplx z = lin.denormalize(theta, 0.3 * lin.tube_radius() * std::polar(1.0, 1.3 * j));
    holo = std::max(holo, kappa_holomorphy_residual(lin, theta, z, 0.05));
  }
  r.measured = {{"a_minus_b_exact", exact}, {"identity_residual", identity}, {"targets", 8},
                {"max_multiplier_error", hit}, {"holomorphy_residual", holo}};
  r.pass = exact && identity < 1e-12 && hit < 1e-6 && holo < 1e-6;
  return r;
}

CriterionResult multiplier_map() {
  CriterionResult r{5, "multiplier-map"};
  std::mt19937_64 rng(1005);
  const double h = 1e-5;
  double fd = 0.0, witness = 0.0, min_kappa = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const Loop lambda = random_member(rng);
    const Loop v = random_direction(rng);
    const cplx d = directional_derivative(lambda, v);
    const cplx approx = (kappa_hat(lambda + v * h) - kappa_hat(lambda - v * h)) / (2.0 * h);
    fd = std::max(fd, std::abs(d - approx) / std::abs(d));
    const cplx k = kappa_hat(lambda);
    witness = std::max(witness, std::abs(directional_derivative(lambda, lambda) - k));
    min_kappa = std::min(min_kappa, std::abs(k));
  }
  const auto alpha = RotationNumber::golden();
  const Loop star = Loop::from_modes({{0, 0.4}, {1, 0.05}, {-2, 0.03}}, 256);
  double section = 0.0;
  for (int j = 0; j < 16; ++j) {
    const cplx k = std::polar(0.2 + 0.02 * j, kTwoPi * j / 16.0);
    section = std::max(section, std::abs(kappa_hat(scaling_section(star, k, alpha)) - k));
  }
  double contour = 0.0;
  bool agree = true;
  for (int i = 0; i < 20; ++i) {
    const Loop lambda = random_member(rng);
    const Loop v = random_direction(rng) * cplx(0.1);
    const double radius = 0.2 * lambda.min_modulus() / v.sup_norm();
    const auto check = holomorphy_residual(lambda, v, radius);
    contour = std::max(contour, check.residual / radius);
    agree = agree && check.verdicts_agree;
  }
  r.measured = {{"max_fd_relative_error", fd}, {"max_witness_error", witness}, {"min_abs_kappa", min_kappa},
                {"max_section_error", section}, {"max_contour_residual_per_radius", contour},
                {"node_doubling_agrees", agree}};
  r.pass = fd < 1e-6 && witness < 1e-12 && min_kappa > 0.0 && section < 1e-10 && contour < 1e-8 && agree;
  return r;
}

CriterionResult julia_rendering() {
  CriterionResult r{6, "julia-rendering"};
  const auto golden = RotationNumber::golden();
  const QpfPolynomial z2({Loop::constant(0.0, 64), Loop::constant(0.0, 64), Loop::constant(1.0, 64)}, golden);
  const double area = fiber_filled_julia(z2, 0.0, {}, 512, 512, 100).bounded_area();
  const double area_err = std::abs(area - M_PI) / M_PI;

  const auto q = make_quadratic(Loop::from_modes({{0, 0.5}, {1, 0.1}}), golden);
  const Rect box{-1.6, 1.6, -1.6, 1.6};
  const double diag = std::hypot(box.x1 - box.x0, box.y1 - box.y0) / 512;
  const auto base = fiber_filled_julia(q, 0.0, box, 512, 512, 200).bounded_points();
  std::vector<double> dist;
  for (double delta : {0.04, 0.02, 0.01}) {
    dist.push_back(hausdorff_distance(base, fiber_filled_julia(q, delta, box, 512, 512, 200).bounded_points()));
  }
  const bool monotone = dist[1] <= dist[0] + diag && dist[2] <= dist[1] + diag;

  const auto forced = make_quadratic(Loop::from_modes({{0, cplx(0.6, 0.3)}, {1, 0.1}, {-1, cplx(0.0, 0.05)}}), golden);
  const auto low = fiber_filled_julia(forced, 0.4, {}, 256, 256, 30);
  const auto high = fiber_filled_julia(forced, 0.4, {}, 256, 256, 120);
  std::mt19937_64 rng(1006);
  std::uniform_int_distribution<int> pick(0, 255);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const int i = pick(rng), j = pick(rng);
    if (low.at(i, j) != 0 && high.at(i, j) != low.at(i, j)) ++violations;
  }
  r.measured = {{"disk_area", area}, {"disk_area_relative_error", area_err}, {"hausdorff", dist},
                {"pixel_diagonal", diag}, {"budget_violations", violations}, {"sampled_pixels", 10000}};
  r.pass = area_err < 0.02 && monotone && dist[2] < 0.1 && violations == 0;
  return r;
}

JobConfig random_config(std::mt19937_64& rng, int i) {
  JobConfig c;
  c.alpha = {{"named", i % 4 == 3 ? "silver" : "golden"}};
  const Loop lambda = random_member(rng, 64) * cplx(1.0 + uniform(rng));
  switch (i % 3) {
    case 0:
      c.task = "julia-fiber";
      c.map = {{"family", "q_lambda"}, {"lambda", loop_to_json(lambda)}};
      c.params = {{"theta", uniform(rng)}, {"res", 64}, {"budget", 80}, {"bounds", {-2.0, 2.0, -2.0, 2.0}}};
      break;
    case 1: {
      c.task = "param-slice";
      const double s = uniform(rng, -1.0, 0.5), t = uniform(rng, -1.0, 0.5);
      c.params = {{"base", loop_to_json(lambda * cplx(0.1))}, {"dir2", loop_to_json(fourier_mode(1, 64))},
                  {"window", {s, s + 0.5, t, t + 0.5}}, {"res", 16}, {"upsample", 2},
                  {"n_iter", 100}, {"angles", 16}};
      break;
    }
    default:
      c.task = "classify";
      c.map = {{"family", "q_lambda"}, {"lambda", loop_to_json(lambda)}};
      c.params = {{"n_iter", 200}, {"angles", 32}};
  }
  return c;
}

bool same(const JobOutput& a, const JobOutput& b) { return a.png == b.png && a.result.dump() == b.result.dump(); }

CriterionResult determinism(double elapsed_before) {
  CriterionResult r{7, "determinism-and-service"};
  const auto start = Clock::now();
  std::mt19937_64 rng(1007);
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("torusdyn-verify-" + std::to_string(std::random_device{}()));
  int deterministic = 0, cache_hits = 0, cache_equal = 0, restart_equal = 0;
  {
    JobService cached({dir, 1, 64});
    for (int i = 0; i < 20; ++i) {
      const JobConfig c = random_config(rng, i);
      const JobOutput fresh = run_job(c);
      if (same(fresh, run_job(c))) ++deterministic;
      const auto first = cached.run(c);
      const auto second = cached.run(c);
      if (!first.from_cache && second.from_cache) ++cache_hits;
      if (same(fresh, first.output) && same(fresh, second.output)) ++cache_equal;
      JobService restarted({dir, 1, 64});
      const auto again = restarted.run(c);
      if (again.from_cache && same(fresh, again.output)) ++restart_equal;
    }
  }
  // Concurrent identical requests share one computation.
  JobService shared({std::nullopt, 2, 64});
  JobConfig c = random_config(rng, 0);
  c.params["res"] = 384;  // long enough for the requests to overlap
  c.params["budget"] = 400;
  std::vector<std::thread> threads;
  std::vector<std::string> bytes(4);
  std::latch go(4);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      go.arrive_and_wait();
      bytes[t] = *shared.run(c).output.png;
    });
  }
  for (auto& t : threads) t.join();
  const bool one_computation = shared.computations() == 1 &&
                               std::all_of(bytes.begin(), bytes.end(), [&](const auto& b) { return b == bytes[0]; });
  std::error_code ec;
  fs::remove_all(dir, ec);

  const double total = elapsed_before + std::chrono::duration<double>(Clock::now() - start).count();
  r.measured = {{"configs", 20}, {"deterministic", deterministic}, {"cache_hits", cache_hits},
                {"cache_equal_fresh", cache_equal}, {"restart_equal_fresh", restart_equal},
                {"concurrent_single_computation", one_computation}, {"suite_seconds", total}};
  r.pass = deterministic == 20 && cache_hits == 20 && cache_equal == 20 && restart_equal == 20 && one_computation &&
           total < 600.0;
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(int only, const std::function<void(const CriterionResult&)>& progress) {
  const std::vector<std::function<CriterionResult()>> criteria = {
      conjugacy_law, cohomology_solver, linearization, surgery, multiplier_map, julia_rendering,
  };
  // Wall-clock budgets where a criterion states one.
  const double limits[] = {30.0, 10.0, 0.0, 0.0, 60.0, 0.0, 0.0};
  std::vector<CriterionResult> out;
  double elapsed = 0.0;
  for (int id = 1; id <= 7; ++id) {
    if (only != 0 && only != id) continue;
    const auto start = Clock::now();
    CriterionResult r;
    try {
      r = id == 7 ? determinism(elapsed) : criteria[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion";
      r.pass = false;
      r.measured = {{"exception", e.what()}};
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    elapsed += r.seconds;
    if (limits[id - 1] > 0.0 && r.seconds >= limits[id - 1]) {
      r.pass = false;
      r.measured["over_time_budget"] = limits[id - 1];
    }
    if (progress) progress(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s  %d %-24s (%.2f s)  ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
  return head + r.measured.dump();
}

}  // namespace torusdyn
