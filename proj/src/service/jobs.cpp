#include "torusdyn/jobs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "torusdyn/cohomology.hpp"
#include "torusdyn/error.hpp"
#include "torusdyn/linearization.hpp"
#include "torusdyn/png.hpp"
#include "torusdyn/surgery.hpp"

namespace torusdyn {
namespace {

const std::vector<std::array<std::uint8_t, 3>> kClassPalette{
    {20, 40, 110},    // member
    {240, 240, 235},  // non-member
    {230, 130, 30},   // nonzero winding
    {128, 128, 128},  // invalid
};

double param_number(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (!v.is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("parameter '") + key + "' must be finite");
  return x;
}

int param_int(const json& params, const char* key, int fallback, int lo, int hi) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("parameter '") + key + "' must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) {
    throw ConfigError(std::string("parameter '") + key + "' out of range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

Rect param_rect(const json& params, const char* key, Rect fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (!v.is_array() || v.size() != 4) throw ConfigError(std::string("'") + key + "' must be [x0, x1, y0, y1]");
  Rect r;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string("'") + key + "' entries must be numbers");
  }
  r = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw ConfigError(std::string("'") + key + "' is an empty rectangle");
  return r;
}

std::pair<int, int> param_resolution(const json& params, int fallback) {
  constexpr int kMaxSide = 8192;
  if (!params.contains("res")) return {fallback, fallback};
  const json& v = params.at("res");
  if (v.is_number_integer()) {
    const int n = param_int(params, "res", fallback, 1, kMaxSide);
    return {n, n};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
    const long long w = v[0].get<long long>(), h = v[1].get<long long>();
    if (w >= 1 && h >= 1 && w <= kMaxSide && h <= kMaxSide) return {static_cast<int>(w), static_cast<int>(h)};
  }
  throw ConfigError("'res' must be an integer or [width, height] within [1, 8192]");
}

json rect_json(const Rect& r) { return json::array({r.x0, r.x1, r.y0, r.y1}); }

const json& require_map(const JobConfig& c) {
  if (!c.map.is_object()) throw ConfigError("task '" + c.task + "' needs a map descriptor");
  return c.map;
}

Loop curve_of(const JobConfig& c, std::size_t n) {
  if (!c.params.contains("curve")) return Loop::constant(0.0, n);
  return parse_loop(c.params.at("curve"));
}

MembershipOptions membership_options(const json& params) {
  MembershipOptions o;
  o.n_iter = param_int(params, "n_iter", o.n_iter, 1, 100000);
  o.fiber_angles = static_cast<std::size_t>(param_int(params, "angles", static_cast<int>(o.fiber_angles), 1, 1 << 14));
  o.converge_threshold = param_number(params, "threshold", o.converge_threshold);
  if (!std::has_single_bit(o.fiber_angles)) throw ConfigError("'angles' must be a power of two");
  if (!(o.converge_threshold > 0.0)) throw ConfigError("'threshold' must be positive");
  return o;
}

JobOutput julia_fiber(const JobConfig& c) {
  const auto p = parse_map(require_map(c), c.alpha);
  const double theta = param_number(c.params, "theta", 0.0);
  const Rect bounds = param_rect(c.params, "bounds", Rect{});
  const auto [w, h] = param_resolution(c.params, 512);
  const int budget = param_int(c.params, "budget", 200, 1, 1000000);
  const auto raster = fiber_filled_julia(p, theta, bounds, w, h, budget);

  std::vector<std::uint8_t> gray(raster.escape.size());
  std::transform(raster.escape.begin(), raster.escape.end(), gray.begin(), escape_gray);
  JobOutput out;
  out.png = encode_gray_png(w, h, gray);
  out.result = {{"task", c.task},
                {"theta", theta},
                {"bounds", rect_json(bounds)},
                {"resolution", {w, h}},
                {"budget", budget},
                {"alpha", p.alpha()},
                {"map", c.map},
                {"escape_radius", raster.escape_radius},
                {"bounded_pixels", raster.bounded_count()},
                {"bounded_area", raster.bounded_area()},
                {"content_hash", sha256_hex(*out.png)}};
  return out;
}

JobOutput param_slice_job(const JobConfig& c) {
  SliceSpec spec;
  const json& p = c.params;
  if (p.contains("base")) spec.base = parse_loop(p.at("base"));
  if (p.contains("dir1")) spec.dir1 = parse_loop(p.at("dir1"));
  if (p.contains("dir2")) spec.dir2 = parse_loop(p.at("dir2"));
  spec.window = param_rect(p, "window", Rect{-1.5, 1.5, -1.5, 1.5});
  std::tie(spec.width, spec.height) = param_resolution(p, 256);
  const int upsample = param_int(p, "upsample", 1, 1, 64);
  const auto options = membership_options(p);
  const RotationNumber alpha = c.rotation();
  const auto raster = param_slice(spec, alpha, options);

  std::vector<std::uint8_t> classes(raster.cells.size());
  std::transform(raster.cells.begin(), raster.cells.end(), classes.begin(),
                 [](const ParamCell& cell) { return static_cast<std::uint8_t>(classify_pixel(cell)); });
  const int pw = spec.width * upsample, ph = spec.height * upsample;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(pw) * ph);
  for (int j = 0; j < ph; ++j) {
    for (int i = 0; i < pw; ++i) {
      pixels[static_cast<std::size_t>(j) * pw + i] =
          classes[static_cast<std::size_t>(j / upsample) * spec.width + i / upsample];
    }
  }
  JobOutput out;
  out.png = encode_palette_png(pw, ph, pixels, kClassPalette);
  out.result = {{"task", c.task},
                {"bounds", rect_json(spec.window)},
                {"resolution", {spec.width, spec.height}},
                {"image_size", {pw, ph}},
                {"budget", options.n_iter},
                {"fiber_angles", options.fiber_angles},
                {"alpha", alpha.alpha()},
                {"map", {{"family", "q_lambda"},
                         {"slice", {{"base", loop_to_json(spec.base)},
                                    {"dir1", loop_to_json(spec.dir1)},
                                    {"dir2", loop_to_json(spec.dir2)}}}}},
                {"stats", slice_stats(classes)},
                {"content_hash", sha256_hex(*out.png)}};
  return out;
}

JobOutput classify_job(const JobConfig& c) {
  Loop lambda;
  if (c.params.contains("lambda")) {
    lambda = parse_loop(c.params.at("lambda"));
  } else {
    const json& map = require_map(c);
    if (!map.contains("family") || map.at("family") != "q_lambda") {
      throw ConfigError("classify needs a q_lambda map or a 'lambda' parameter");
    }
    lambda = parse_lambda(map);
  }
  const auto report = membership_h0star(lambda, c.rotation(), membership_options(c.params));
  return {membership_json(report), std::nullopt};
}

JobOutput multiplier_job(const JobConfig& c) {
  const auto p = parse_map(require_map(c), c.alpha);
  return {multiplier_json(fibered_multiplier(p, curve_of(c, p.grid_size()))), std::nullopt};
}

JobOutput linearize_job(const JobConfig& c) {
  const auto p = parse_map(require_map(c), c.alpha);
  LinearizerOptions opt;
  opt.m_inflation = param_number(c.params, "m_inflation", opt.m_inflation);
  opt.k_max = param_int(c.params, "kmax", opt.k_max, -1, 1 << 20);
  const auto lin = Linearizer::build(p, curve_of(c, p.grid_size()), opt);
  json r = multiplier_json(lin.data());
  r["R"] = lin.tube_radius();
  r["M"] = lin.sup_nonlinear();
  r["critical_distance"] = lin.critical_distance();
  r["conj_residual"] = lin.conj_residual();
  r["cohomology_residual"] = lin.cohomology_residual();
  r["koenigs_depth"] = lin.koenigs_depth();
  r["index"] = linearizer_index(lin);
  return {r, std::nullopt};
}

JobOutput surgery_job(const JobConfig& c) {
  const auto p = parse_map(require_map(c), c.alpha);
  if (!c.params.contains("kappa")) throw ConfigError("surgery needs a target 'kappa'");
  const cplx kappa = parse_complex(c.params.at("kappa"));
  const auto res = tube_local_surgery(p, curve_of(c, p.grid_size()), kappa);
  json r = {{"kappa", complex_to_json(kappa)},
            {"kappa0", complex_to_json(res.model.kappa0)},
            {"a_k", complex_to_json(res.model.a)},
            {"b_k", complex_to_json(res.model.b)},
            {"beltrami_ratio", complex_to_json(res.model.beltrami_ratio)},
            {"dilatation", res.model.dilatation},
            {"measured_multiplier", multiplier_json(res.measured)},
            {"multiplier_error", res.multiplier_error},
            {"residuals",
             {{"invariance", res.invariance_residual}, {"conjugacy", res.conjugacy_residual}}},
            {"displacement", res.displacement}};
  return {r, std::nullopt};
}

JobOutput cohomology_job(const JobConfig& c) {
  if (!c.params.contains("g")) throw ConfigError("cohomology needs a right-hand side 'g'");
  const Loop g = parse_loop(c.params.at("g"));
  const int kmax = param_int(c.params, "kmax", static_cast<int>(g.size() / 4), 0, 1 << 20);
  const auto sol = solve_cohomological(g, c.rotation(), kmax);
  json r = {{"u", loop_to_json(sol.u)},
            {"residual_sup", sol.residual_sup},
            {"smallest_divisor", sol.smallest_divisor},
            {"modes_used", sol.modes_used}};
  return {r, std::nullopt};
}

}  // namespace

CellClass classify_pixel(const ParamCell& cell) {
  if (!cell.valid) return CellClass::Invalid;
  if (cell.winding != 0) return CellClass::Winding;
  return cell.member ? CellClass::Member : CellClass::NonMember;
}

std::uint8_t escape_gray(int n) {
  if (n <= 0) return 0;
  return static_cast<std::uint8_t>(std::clamp(256 - n, 1, 255));
}

json multiplier_json(const MultiplierData& d) {
  return {{"m", d.index}, {"kappa", complex_to_json(d.kappa)}, {"Lambda", d.lyapunov}, {"rho", d.rho}};
}

json membership_json(const MembershipReport& r) {
  json j = {{"winding", r.winding},
            {"lyapunov", r.lyapunov ? json(*r.lyapunov) : json(nullptr)},
            {"kappa_hat", r.kappa_hat ? complex_to_json(*r.kappa_hat) : json(nullptr)},
            {"critical_orbit_bounded", r.critical_orbit_bounded},
            {"critical_orbit_converges_to_zero", r.critical_orbit_converges_to_zero},
            {"in_H0star", r.in_h0star},
            {"escape_iteration", r.escape_iteration},
            {"escape_radius", r.escape_radius},
            {"final_max_modulus", r.final_max_modulus},
            {"diagnostics", r.diagnostics}};
  return j;
}

json slice_stats(const std::vector<std::uint8_t>& classes) {
  std::array<std::size_t, 4> n{};
  for (auto c : classes) ++n[std::min<std::size_t>(c, 3)];
  return {{"cells", classes.size()},
          {"members", n[0]},
          {"non_members", n[1]},
          {"nonzero_winding", n[2]},
          {"invalid", n[3]}};
}

JobOutput run_job(const JobConfig& c) {
  if (c.task == "julia-fiber") return julia_fiber(c);
  if (c.task == "param-slice") return param_slice_job(c);
  if (c.task == "classify") return classify_job(c);
  if (c.task == "multiplier") return multiplier_job(c);
  if (c.task == "linearize") return linearize_job(c);
  if (c.task == "surgery") return surgery_job(c);
  if (c.task == "cohomology") return cohomology_job(c);
  throw ConfigError("unknown task kind '" + c.task + "'");
}

}  // namespace torusdyn
