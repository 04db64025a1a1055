#pragma once

#include <optional>
#include <string>

#include "torusdyn/config.hpp"
#include "torusdyn/julia.hpp"
#include "torusdyn/multiplier_map.hpp"

namespace torusdyn {

/// Result of one job: a JSON document and, for rendering tasks, a PNG. For
/// rendering tasks the JSON is the sidecar metadata.
struct JobOutput {
  json result;
  std::optional<std::string> png;
};

/// Classification palette indices of param-slice PNGs.
enum class CellClass : std::uint8_t { Member = 0, NonMember = 1, Winding = 2, Invalid = 3 };
CellClass classify_pixel(const ParamCell& cell);

/// Gray level of an escape count: 0 for bounded, 256 - n clamped to [1, 255].
std::uint8_t escape_gray(int escape_iteration);

/// Runs the task of a validated config. Throws ConfigError on bad parameters
/// and DomainError from the numerical modules.
JobOutput run_job(const JobConfig& config);

json multiplier_json(const MultiplierData& d);
json membership_json(const MembershipReport& r);

/// Per-tile counts of the classification classes.
json slice_stats(const std::vector<std::uint8_t>& classes);

}  // namespace torusdyn
