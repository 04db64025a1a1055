#include "torusdyn/server.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include "torusdyn/error.hpp"

namespace torusdyn {
namespace fs = std::filesystem;

namespace {

constexpr int kTileIterations = 200;
constexpr int kTileAngles = 32;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

// Maps failures to status codes: 400 malformed, 404 unknown id, 422 domain
// error, 503 queue full.
template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const json::exception& e) {
    send_error(res, 400, "BadRequest", e.what());
  } catch (const ConfigError& e) {
    send_error(res, 400, "BadRequest", e.what());
  } catch (const DomainError& e) {
    send_error(res, 422, e.code_name(), e.what());
  } catch (const QueueFull& e) {
    send_error(res, 503, "QueueFull", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON body: ") + e.what());
  }
}

std::string query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) throw ConfigError(std::string("missing query parameter '") + key + "'");
  return req.get_param_value(key);
}

double query_number(const httplib::Request& req, const char* key) {
  const std::string text = query(req, key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("query parameter '") + key + "' must be a number");
}

long long query_int(const httplib::Request& req, const char* key, long long lo, long long hi) {
  const std::string text = query(req, key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size() && v >= lo && v <= hi) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("query parameter '") + key + "' must be an integer in [" + std::to_string(lo) +
                    ", " + std::to_string(hi) + "]");
}

json rect_from_text(const std::string& text) {
  json out = json::array();
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("bounds must be x0,x1,y0,y1");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != 4) throw ConfigError("bounds must be x0,x1,y0,y1");
  return out;
}

void send_job(httplib::Response& res, const JobResponse& r) {
  res.set_header("X-Content-Hash", r.hash);
  res.set_header("X-Cache", r.from_cache ? "hit" : "miss");
  if (r.output.png) {
    res.set_header("X-Artifact-Meta", r.output.result.dump());
    res.status = 200;
    res.set_content(*r.output.png, "image/png");
  } else {
    send_json(res, 200, r.output.result);
  }
}

}  // namespace

std::string Registry::put(const std::string& kind, const json& def) {
  const std::string id = sha256_hex(kind + "\n" + canonical_json(def)).substr(0, 16);
  std::lock_guard lock(mu_);
  items_[kind + "/" + id] = def;
  if (cache_) {
    const fs::path dir = cache_->dir() / "registry";
    fs::create_directories(dir);
    const fs::path file = dir / (kind + "-" + id + ".json");
    if (!fs::exists(file)) {
      const fs::path tmp = dir / (".tmp-" + kind + "-" + id);
      std::ofstream(tmp) << canonical_json(def);
      fs::rename(tmp, file);
    }
  }
  return id;
}

std::optional<json> Registry::get(const std::string& kind, const std::string& id) {
  std::lock_guard lock(mu_);
  if (auto it = items_.find(kind + "/" + id); it != items_.end()) return it->second;
  if (!cache_ || id.find_first_not_of("0123456789abcdef") != std::string::npos) return std::nullopt;
  std::ifstream in(cache_->dir() / "registry" / (kind + "-" + id + ".json"));
  if (!in) return std::nullopt;
  try {
    json def = json::parse(in);
    items_[kind + "/" + id] = def;
    return def;
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

ApiServer::ApiServer(JobService& service) : service_(service), registry_(service.cache()) { routes(); }

void ApiServer::routes() {
  server_.Get("/api/meta", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200,
              {{"version", kVersion},
               {"alpha_presets",
                {{"golden", RotationNumber::named("golden").alpha()},
                 {"silver", RotationNumber::named("silver").alpha()}}},
               {"tile_size", kTileSize},
               {"families", {"q_lambda", "f_c", "general"}},
               {"tasks", {"julia-fiber", "param-slice", "classify", "multiplier", "linearize", "surgery",
                          "cohomology"}}});
  });

  server_.Post("/api/slice", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      if (!body.is_object()) throw ConfigError("slice definition must be an object");
      json def = json::object();
      for (const char* key : {"base", "dir1", "dir2"}) {
        if (body.contains(key)) def[key] = loop_to_json(parse_loop(body.at(key)));
      }
      def["alpha"] = parse_alpha(body.value("alpha", json())).alpha();
      def["window"] = json::array({-1.5, 1.5, -1.5, 1.5});
      if (body.contains("window")) {
        const json& w = body.at("window");
        if (!w.is_array() || w.size() != 4 || !(w[1].get<double>() > w[0].get<double>()) ||
            !(w[3].get<double>() > w[2].get<double>())) {
          throw ConfigError("window must be [s0, s1, t0, t1] with s0 < s1 and t0 < t1");
        }
        def["window"] = w;
      }
      send_json(res, 200, {{"slice", registry_.put("slice", def)}, {"definition", def}});
    });
  });

  server_.Post("/api/map", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const json map = body.contains("map") ? body.at("map") : body;
      const json alpha = body.contains("map") ? body.value("alpha", json()) : json();
      const auto p = parse_map(map, alpha);  // validates
      const json def = {{"map", map}, {"alpha", p.alpha()}};
      send_json(res, 200, {{"map", registry_.put("map", def)}});
    });
  });

  server_.Get("/api/param-tile", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto slice = registry_.get("slice", query(req, "slice"));
      if (!slice) return send_error(res, 404, "UnknownSlice", "no slice registered under this id");
      const auto zoom = query_int(req, "zoom", 0, 30);
      const long long tiles = 1LL << zoom;
      const auto x = query_int(req, "x", 0, tiles - 1);
      const auto y = query_int(req, "y", 0, tiles - 1);
      const auto cells = req.has_param("res") ? query_int(req, "res", 1, kTileSize) : kTileSize;
      if (kTileSize % cells != 0) throw ConfigError("res must divide the tile size 256");
      const json& w = slice->at("window");
      const double ds = (w[1].get<double>() - w[0].get<double>()) / static_cast<double>(tiles);
      const double dt = (w[3].get<double>() - w[2].get<double>()) / static_cast<double>(tiles);
      const double s0 = w[0].get<double>() + static_cast<double>(x) * ds;
      const double t1 = w[3].get<double>() - static_cast<double>(y) * dt;

      JobConfig c;
      c.task = "param-slice";
      c.alpha = slice->at("alpha");
      c.params = {{"window", {s0, s0 + ds, t1 - dt, t1}},
                  {"res", cells},
                  {"upsample", kTileSize / cells},
                  {"n_iter", req.has_param("n_iter") ? query_int(req, "n_iter", 1, 100000) : kTileIterations},
                  {"angles", req.has_param("angles") ? query_int(req, "angles", 1, 1 << 14) : kTileAngles}};
      for (const char* key : {"base", "dir1", "dir2"}) {
        if (slice->contains(key)) c.params[key] = slice->at(key);
      }
      const auto r = service_.run(c);
      res.set_header("X-Tile-Stats", r.output.result.at("stats").dump());
      send_job(res, r);
    });
  });

  server_.Get("/api/julia-fiber", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto def = registry_.get("map", query(req, "map"));
      if (!def) return send_error(res, 404, "UnknownMap", "no map registered under this id");
      JobConfig c;
      c.task = "julia-fiber";
      c.map = def->at("map");
      c.alpha = def->at("alpha");
      c.params["theta"] = req.has_param("theta") ? query_number(req, "theta") : 0.0;
      if (req.has_param("bounds")) c.params["bounds"] = rect_from_text(query(req, "bounds"));
      c.params["res"] = req.has_param("res") ? query_int(req, "res", 1, 4096) : 256;
      if (req.has_param("budget")) c.params["budget"] = query_int(req, "budget", 1, 100000);
      send_job(res, service_.run(c));
    });
  });

  server_.Post("/api/classify", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body = parse_body(req);
      if (!body.is_object()) throw ConfigError("job config must be an object");
      if (!body.contains("task")) body["task"] = "classify";
      if (body.at("task") != "classify") throw ConfigError("POST /api/classify takes a classify job");
      send_job(res, service_.run(JobConfig::from_json(body)));
    });
  });

  server_.Post("/api/job", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_job(res, service_.run(JobConfig::from_json(parse_body(req)))); });
  });
}

}  // namespace torusdyn
