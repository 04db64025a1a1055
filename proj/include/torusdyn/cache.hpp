#pragma once

#include <condition_variable>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "torusdyn/jobs.hpp"

namespace torusdyn {

/// Cache directory from TORUSDYN_CACHE, else `fallback`.
std::filesystem::path resolve_cache_dir(const std::filesystem::path& fallback);

/// Content-addressed artifact store: <dir>/<hash[0:2]>/<hash>/ holding
/// config.json (canonical), result.json, optional artifact.png and meta.json.
/// Entries are written to a temporary directory and renamed into place.
class ArtifactCache {
 public:
  explicit ArtifactCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path entry_path(const std::string& hash) const;

  /// The stored output, or nothing when absent. An entry whose stored config
  /// differs from `canonical` is treated as corrupt and removed.
  std::optional<JobOutput> load(const std::string& hash, const std::string& canonical) const;
  void store(const std::string& hash, const std::string& canonical, const JobOutput& out) const;

 private:
  std::filesystem::path dir_;
};

class QueueFull : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServiceOptions {
  std::optional<std::filesystem::path> cache_dir;  // no disk cache when empty
  unsigned workers = 0;                            // 0: hardware concurrency
  std::size_t max_queue = 64;                      // waiting jobs before QueueFull
};

struct JobResponse {
  JobOutput output;
  std::string hash;
  bool from_cache = false;
};

/// Runs jobs on a bounded number of concurrent workers; identical in-flight
/// jobs share one computation and completed jobs are served from the cache.
class JobService {
 public:
  explicit JobService(ServiceOptions options = {});

  JobResponse run(const JobConfig& config);
  unsigned workers() const noexcept { return workers_; }
  std::size_t computations() const;  // jobs actually computed
  const ArtifactCache* cache() const noexcept { return cache_ ? &*cache_ : nullptr; }

 private:
  JobOutput compute(const JobConfig& config);

  std::optional<ArtifactCache> cache_;
  unsigned workers_;
  std::size_t max_queue_;
  mutable std::mutex mu_;
  std::condition_variable slot_free_;
  unsigned running_ = 0;
  std::size_t waiting_ = 0;
  std::size_t computed_ = 0;
  std::map<std::string, std::shared_future<JobOutput>> in_flight_;
};

/// Writes the PNG (if any) to `path` and the JSON result beside it
/// (`path` with extension .json); without a PNG the JSON goes to `path`.
void write_artifacts(const JobOutput& out, const std::filesystem::path& path);

}  // namespace torusdyn
