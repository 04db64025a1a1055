#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "httplib.h"
#include "torusdyn/cache.hpp"

namespace torusdyn {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kTileSize = 256;

/// Registered slices and maps are kept in memory and, with a disk cache, under
/// <cache>/registry/ so ids survive restarts.
class Registry {
 public:
  explicit Registry(const ArtifactCache* cache) : cache_(cache) {}

  /// Stores `def` under the first 16 hex digits of its canonical hash.
  std::string put(const std::string& kind, const json& def);
  std::optional<json> get(const std::string& kind, const std::string& id);

 private:
  const ArtifactCache* cache_;
  std::mutex mu_;
  std::map<std::string, json> items_;
};

/// The HTTP API over a JobService:
///   GET  /api/meta
///   POST /api/slice          slice definition -> {"slice": id}
///   POST /api/map            map descriptor (+ alpha) -> {"map": id}
///   GET  /api/param-tile     ?slice&x&y&zoom[&res&n_iter&angles]
///   GET  /api/julia-fiber    ?map&theta&bounds=x0,x1,y0,y1&res[&budget]
///   POST /api/classify       JobConfig -> MembershipReport
///   POST /api/job            any JobConfig -> result JSON
class ApiServer {
 public:
  explicit ApiServer(JobService& service);

  httplib::Server& http() noexcept { return server_; }
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }

 private:
  void routes();

  JobService& service_;
  Registry registry_;
  httplib::Server server_;
};

}  // namespace torusdyn
