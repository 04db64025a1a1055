#include "torusdyn/cache.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <random>
#include <thread>

namespace torusdyn {
namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string unique_suffix() {
  thread_local std::mt19937_64 rng(std::random_device{}());
  return std::to_string(rng());
}

}  // namespace

fs::path resolve_cache_dir(const fs::path& fallback) {
  if (const char* env = std::getenv("TORUSDYN_CACHE"); env && *env) return env;
  return fallback;
}

ArtifactCache::ArtifactCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path ArtifactCache::entry_path(const std::string& hash) const { return dir_ / hash.substr(0, 2) / hash; }

std::optional<JobOutput> ArtifactCache::load(const std::string& hash, const std::string& canonical) const {
  const fs::path entry = entry_path(hash);
  const auto stored = read_file(entry / "config.json");
  if (!stored) return std::nullopt;
  const auto result = read_file(entry / "result.json");
  if (*stored != canonical || !result) {
    std::error_code ec;
    fs::remove_all(entry, ec);
    return std::nullopt;
  }
  JobOutput out;
  try {
    out.result = json::parse(*result);
  } catch (const json::parse_error&) {
    std::error_code ec;
    fs::remove_all(entry, ec);
    return std::nullopt;
  }
  if (out.result.contains("content_hash")) {
    auto png = read_file(entry / "artifact.png");
    if (!png || sha256_hex(*png) != out.result.at("content_hash")) {
      std::error_code ec;
      fs::remove_all(entry, ec);
      return std::nullopt;
    }
    out.png = std::move(*png);
  }
  return out;
}

void ArtifactCache::store(const std::string& hash, const std::string& canonical, const JobOutput& out) const {
  const fs::path entry = entry_path(hash);
  fs::create_directories(entry.parent_path());
  const fs::path tmp = entry.parent_path() / (".tmp-" + hash + "-" + unique_suffix());
  fs::create_directories(tmp);
  write_file(tmp / "config.json", canonical);
  write_file(tmp / "result.json", out.result.dump(2) + "\n");
  if (out.png) write_file(tmp / "artifact.png", *out.png);
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  json meta = {{"hash", hash}, {"created", now}, {"artifacts", {"result.json"}}};
  if (out.png) meta["artifacts"].push_back("artifact.png");
  write_file(tmp / "meta.json", meta.dump(2) + "\n");

  std::error_code ec;
  fs::rename(tmp, entry, ec);
  if (ec) {
    // Another writer got there first; its entry has the same content.
    fs::remove_all(tmp, ec);
  }
}

JobService::JobService(ServiceOptions options)
    : workers_(options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency())),
      max_queue_(options.max_queue) {
  if (options.cache_dir) cache_.emplace(*options.cache_dir);
}

std::size_t JobService::computations() const {
  std::lock_guard lock(mu_);
  return computed_;
}

JobOutput JobService::compute(const JobConfig& config) {
  std::unique_lock lock(mu_);
  if (running_ >= workers_) {
    if (waiting_ >= max_queue_) throw QueueFull("job queue is full");
    ++waiting_;
    slot_free_.wait(lock, [&] { return running_ < workers_; });
    --waiting_;
  }
  ++running_;
  ++computed_;
  lock.unlock();
  struct Release {
    JobService* s;
    ~Release() {
      {
        std::lock_guard l(s->mu_);
        --s->running_;
      }
      s->slot_free_.notify_one();
    }
  } release{this};
  return run_job(config);
}

JobResponse JobService::run(const JobConfig& config) {
  JobResponse response;
  response.hash = config.hash();
  json key = config.to_json();
  key.erase("output");
  const std::string canonical = canonical_json(key);

  std::promise<JobOutput> promise;
  std::shared_future<JobOutput> shared;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    if (auto it = in_flight_.find(response.hash); it != in_flight_.end()) {
      shared = it->second;
    } else {
      shared = promise.get_future().share();
      in_flight_.emplace(response.hash, shared);
      owner = true;
    }
  }
  if (!owner) {
    response.output = shared.get();
    return response;
  }

  auto finish = [&] {
    std::lock_guard lock(mu_);
    in_flight_.erase(response.hash);
  };
  try {
    std::optional<JobOutput> hit;
    if (cache_) hit = cache_->load(response.hash, canonical);
    if (hit) {
      response.from_cache = true;
      response.output = std::move(*hit);
    } else {
      response.output = compute(config);
      if (cache_) cache_->store(response.hash, canonical, response.output);
    }
    promise.set_value(response.output);
  } catch (...) {
    promise.set_exception(std::current_exception());
    finish();
    throw;
  }
  finish();
  return response;
}

void write_artifacts(const JobOutput& out, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (out.png) {
    write_file(path, *out.png);
    fs::path sidecar = path;
    sidecar.replace_extension(".json");
    write_file(sidecar, out.result.dump(2) + "\n");
  } else {
    write_file(path, out.result.dump(2) + "\n");
  }
}

}  // namespace torusdyn
