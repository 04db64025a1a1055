// torusdyn command line: computations as JSON on stdout, renders as PNG.
//
// Exit status: 0 ok, 1 verification failure, 2 bad arguments, 3 domain error.

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "torusdyn/cache.hpp"
#include "torusdyn/error.hpp"
#include "torusdyn/multiplier_map.hpp"
#include "torusdyn/server.hpp"
#include "torusdyn/verify.hpp"

using namespace torusdyn;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitArgs = 2;
constexpr int kExitDomain = 3;

struct Args {
  std::string alpha;
  std::string lambda;
  std::string map;
  std::string curve;
  std::string g;
  std::string kappa;
  std::string config;
  std::string out;
  std::string cache;
  std::string bounds;
  std::string window;
  std::string base, dir1, dir2;
  double theta = 0.0;
  int res = 0;
  int budget = 0;
  int kmax = -1;
  int n_iter = 0;
  int angles = 0;
  double threshold = 0.0;
  int port = 8080;
  std::string host = "127.0.0.1";
  unsigned workers = 0;
  std::size_t queue = 64;
  int only = 0;
};

json json_from_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  try {
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) return json::parse(text);
    std::ifstream in(text);
    if (!in) throw ConfigError("cannot read '" + text + "'");
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + text + "': " + e.what());
  }
}

json alpha_json(const Args& a) {
  if (a.alpha.empty()) return nullptr;
  const auto first = a.alpha.find_first_not_of(" \t");
  if (first != std::string::npos && a.alpha[first] == '{') return json_from_text(a.alpha);
  return a.alpha;  // number or preset name as a string
}

json rect_json(const std::string& text, const char* what) {
  json r = json::array();
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      r.push_back(std::stod(part, &used));
      if (used != part.size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + " must be x0,x1,y0,y1");
    }
  }
  if (r.size() != 4) throw ConfigError(std::string(what) + " must be x0,x1,y0,y1");
  return r;
}

// Map descriptor from --map, else a q_lambda map from --lambda.
json map_json(const Args& a) {
  if (!a.map.empty()) return json_from_text(a.map);
  if (!a.lambda.empty()) return {{"family", "q_lambda"}, {"lambda", loop_spec_from_text(a.lambda)}};
  throw ConfigError("a map is required: pass --map or --lambda");
}

JobConfig base_config(const Args& a, const std::string& task) {
  if (!a.config.empty()) {
    JobConfig c = JobConfig::from_json(json_from_text(a.config));
    if (c.task != task) throw ConfigError("config task '" + c.task + "' does not match '" + task + "'");
    if (!a.out.empty()) c.output = a.out;
    return c;
  }
  JobConfig c;
  c.task = task;
  c.alpha = alpha_json(a);
  c.output = a.out;
  return c;
}

void add_alpha(CLI::App* app, Args& a) {
  app->add_option("--alpha", a.alpha, "rotation number: number, golden, silver or JSON descriptor");
}

void add_map(CLI::App* app, Args& a) {
  add_alpha(app, a);
  app->add_option("--map", a.map, "map descriptor (inline JSON or file)");
  app->add_option("--lambda", a.lambda, "lambda loop for z^2 + lambda z: const:re[,im], JSON or file");
  app->add_option("--curve", a.curve, "invariant curve loop (default 0)");
  app->add_option("--config", a.config, "job config JSON file");
}

void add_membership(CLI::App* app, Args& a) {
  app->add_option("--n-iter", a.n_iter, "critical orbit iterations")->check(CLI::PositiveNumber);
  app->add_option("--angles", a.angles, "fiber angles (power of two)")->check(CLI::PositiveNumber);
  app->add_option("--threshold", a.threshold, "convergence threshold")->check(CLI::PositiveNumber);
}

void apply_membership(const Args& a, json& params) {
  if (a.n_iter) params["n_iter"] = a.n_iter;
  if (a.angles) params["angles"] = a.angles;
  if (a.threshold > 0.0) params["threshold"] = a.threshold;
}

JobOutput execute(const Args& a, const JobConfig& c) {
  JobOutput out;
  const char* env = std::getenv("TORUSDYN_CACHE");
  if (!a.cache.empty() || (env && *env)) {
    JobService service({resolve_cache_dir(a.cache), 0, 64});
    out = service.run(c).output;
  } else {
    out = run_job(c);
  }
  if (!c.output.empty()) write_artifacts(out, c.output);
  return out;
}

int print(const json& j) {
  std::cout << j.dump(2) << "\n";
  return 0;
}

int serve(const Args& a) {
  const auto dir = resolve_cache_dir(a.cache.empty() ? "torusdyn-cache" : a.cache);
  JobService service({dir, a.workers, a.queue});
  ApiServer server(service);
  std::cerr << "torusdyn " << kVersion << " serving on http://" << a.host << ":" << a.port << " (cache " << dir.string()
            << ")\n";
  if (!server.listen(a.host, a.port)) {
    std::cerr << "cannot bind " << a.host << ":" << a.port << "\n";
    return kExitArgs;
  }
  return 0;
}

int verify(const Args& a) {
  const auto results = run_acceptance(a.only, [](const CriterionResult& r) { std::cerr << format_line(r) << "\n"; });
  json report = json::array();
  bool ok = true;
  for (const auto& r : results) {
    report.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds},
                      {"measured", r.measured}});
    ok = ok && r.pass;
  }
  print(report);
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torusdyn: quasiperiodically forced holomorphic polynomials"};
  app.require_subcommand(1);
  Args a;
  std::function<int()> action;

  auto* julia = app.add_subcommand("render-julia", "escape-time PNG of one fiber of the filled Julia set");
  add_map(julia, a);
  julia->add_option("--theta", a.theta, "fiber angle in turns");
  julia->add_option("--bounds", a.bounds, "x0,x1,y0,y1 (default -2,2,-2,2)");
  julia->add_option("--res", a.res, "pixels per side (default 512)")->check(CLI::PositiveNumber);
  julia->add_option("--budget", a.budget, "iteration budget (default 200)")->check(CLI::PositiveNumber);
  julia->add_option("--out", a.out, "PNG path; the sidecar JSON goes next to it");
  julia->add_option("--cache", a.cache, "artifact cache directory");
  julia->callback([&] {
    action = [&] {
      JobConfig c = base_config(a, "julia-fiber");
      if (a.config.empty()) {
        c.map = map_json(a);
        c.params["theta"] = a.theta;
        if (!a.bounds.empty()) c.params["bounds"] = rect_json(a.bounds, "--bounds");
        if (a.res) c.params["res"] = a.res;
        if (a.budget) c.params["budget"] = a.budget;
      }
      if (c.output.empty()) c.output = "julia.png";
      return print(execute(a, c).result);
    };
  });

  auto* param = app.add_subcommand("render-param", "classification PNG of a parameter slice");
  add_alpha(param, a);
  param->add_option("--base", a.base, "base loop (default 0)");
  param->add_option("--dir1", a.dir1, "first direction loop (default 1)");
  param->add_option("--dir2", a.dir2, "second direction loop (default i)");
  param->add_option("--window", a.window, "s0,s1,t0,t1 (default -1.5,1.5,-1.5,1.5)");
  param->add_option("--res", a.res, "cells per side (default 256)")->check(CLI::PositiveNumber);
  param->add_option("--config", a.config, "job config JSON file");
  param->add_option("--out", a.out, "PNG path; the sidecar JSON goes next to it");
  param->add_option("--cache", a.cache, "artifact cache directory");
  add_membership(param, a);
  param->callback([&] {
    action = [&] {
      JobConfig c = base_config(a, "param-slice");
      if (a.config.empty()) {
        if (!a.base.empty()) c.params["base"] = loop_spec_from_text(a.base);
        if (!a.dir1.empty()) c.params["dir1"] = loop_spec_from_text(a.dir1);
        if (!a.dir2.empty()) c.params["dir2"] = loop_spec_from_text(a.dir2);
        if (!a.window.empty()) c.params["window"] = rect_json(a.window, "--window");
        if (a.res) c.params["res"] = a.res;
        apply_membership(a, c.params);
      }
      if (c.output.empty()) c.output = "slice.png";
      return print(execute(a, c).result);
    };
  });

  auto classify_action = [&] {
    JobConfig c = base_config(a, "classify");
    if (a.config.empty()) {
      if (a.lambda.empty() && a.map.empty()) throw ConfigError("classify needs --lambda");
      c.map = map_json(a);
      apply_membership(a, c.params);
    }
    return print(execute(a, c).result);
  };
  auto add_classify = [&](CLI::App* cmd) {
    add_alpha(cmd, a);
    cmd->add_option("--lambda", a.lambda, "lambda loop: const:re[,im], JSON or file");
    cmd->add_option("--map", a.map, "q_lambda map descriptor");
    cmd->add_option("--config", a.config, "job config JSON file");
    cmd->add_option("--cache", a.cache, "artifact cache directory");
    add_membership(cmd, a);
    cmd->callback([&] { action = classify_action; });
  };
  add_classify(app.add_subcommand("classify", "membership in the zero-winding hyperbolic region"));
  auto* param_group = app.add_subcommand("param", "parameter-space tools");
  param_group->require_subcommand(1);
  add_classify(param_group->add_subcommand("classify", "membership in the zero-winding hyperbolic region"));
  auto* section = param_group->add_subcommand("section", "scaling section lambda with kappa^(lambda) = kappa");
  add_alpha(section, a);
  section->add_option("--lambda", a.lambda, "base member loop")->required();
  section->add_option("--kappa", a.kappa, "target multiplier re,im")->required();
  add_membership(section, a);
  section->callback([&] {
    action = [&] {
      MembershipOptions opt;
      if (a.n_iter) opt.n_iter = a.n_iter;
      if (a.angles) opt.fiber_angles = static_cast<std::size_t>(a.angles);
      if (a.threshold > 0.0) opt.converge_threshold = a.threshold;
      const Loop star = parse_loop(loop_spec_from_text(a.lambda));
      const Loop l = scaling_section(star, parse_complex_text(a.kappa), parse_alpha(alpha_json(a)), opt);
      json out = loop_to_json(l);
      out["kappa_hat"] = complex_to_json(kappa_hat(l));
      return print(out);
    };
  });

  auto with_map = [&](const std::string& task) {
    JobConfig c = base_config(a, task);
    if (a.config.empty()) {
      c.map = map_json(a);
      if (!a.curve.empty()) c.params["curve"] = loop_spec_from_text(a.curve);
    }
    return c;
  };
  auto add_multiplier = [&](CLI::App* cmd) {
    add_map(cmd, a);
    cmd->callback([&] { action = [&] { return print(execute(a, with_map("multiplier")).result); }; });
  };
  add_multiplier(app.add_subcommand("multiplier", "index, multiplier, Lyapunov exponent and rotation number"));
  auto* dynamics = app.add_subcommand("dynamics", "fibered dynamics tools");
  dynamics->require_subcommand(1);
  add_multiplier(dynamics->add_subcommand("multiplier", "index, multiplier, Lyapunov exponent and rotation number"));

  auto* lin = app.add_subcommand("linearize", "Koenigs linearization on the invariant tube");
  add_map(lin, a);
  lin->add_option("--kmax", a.kmax, "cohomology truncation (default N/4)");
  lin->callback([&] {
    action = [&] {
      JobConfig c = with_map("linearize");
      if (a.config.empty() && a.kmax >= 0) c.params["kmax"] = a.kmax;
      return print(execute(a, c).result);
    };
  });

  auto add_surgery = [&](CLI::App* cmd) {
    add_map(cmd, a);
    cmd->add_option("--kappa", a.kappa, "target multiplier re,im");
    cmd->callback([&] {
      action = [&] {
        JobConfig c = with_map("surgery");
        if (a.config.empty()) {
          if (a.kappa.empty()) throw ConfigError("surgery needs --kappa");
          c.params["kappa"] = complex_to_json(parse_complex_text(a.kappa));
        }
        return print(execute(a, c).result);
      };
    });
  };
  auto* surgery = app.add_subcommand("surgery", "tube-local multiplier retargeting");
  add_surgery(surgery);
  add_surgery(surgery->add_subcommand("retarget", "tube-local multiplier retargeting"));

  auto add_cohomology = [&](CLI::App* cmd) {
    add_alpha(cmd, a);
    cmd->add_option("--g", a.g, "right-hand side loop (zero mean)");
    cmd->add_option("--kmax", a.kmax, "truncation (default N/4)");
    cmd->add_option("--config", a.config, "job config JSON file");
    cmd->callback([&] {
      action = [&] {
        JobConfig c = base_config(a, "cohomology");
        if (a.config.empty()) {
          if (a.g.empty()) throw ConfigError("cohomology needs --g");
          c.params["g"] = loop_spec_from_text(a.g);
          if (a.kmax >= 0) c.params["kmax"] = a.kmax;
        }
        return print(execute(a, c).result);
      };
    });
  };
  auto* coh = app.add_subcommand("cohomology", "solve u(theta + alpha) - u(theta) = g(theta)");
  add_cohomology(coh);
  add_cohomology(coh->add_subcommand("solve", "solve u(theta + alpha) - u(theta) = g(theta)"));

  auto* srv = app.add_subcommand("serve", "HTTP API with a content-addressed cache");
  srv->add_option("--port", a.port, "TCP port")->check(CLI::Range(1, 65535));
  srv->add_option("--host", a.host, "bind address");
  srv->add_option("--cache", a.cache, "cache directory (TORUSDYN_CACHE overrides)");
  srv->add_option("--workers", a.workers, "concurrent jobs (default: cores)");
  srv->add_option("--queue", a.queue, "waiting jobs before 503");
  srv->callback([&] { action = [&] { return serve(a); }; });

  auto* ver = app.add_subcommand("verify", "run the acceptance property suite");
  ver->add_option("--only", a.only, "run one criterion (1-7)")->check(CLI::Range(1, 7));
  ver->callback([&] { action = [&] { return verify(a); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgs;
  }
  try {
    return action ? action() : kExitArgs;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  } catch (const DomainError& e) {
    std::cout << json{{"error", e.code_name()}, {"message", e.what()}}.dump() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  }
}
