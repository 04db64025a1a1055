#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "torusdyn/qpf.hpp"

namespace torusdyn {

using json = nlohmann::json;

/// Malformed descriptor or job configuration; maps to exit 2 / HTTP 400.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kConfigSamples = 256;

/// {"kind":"fourier","coeffs":[[k,re,im],...],"n"?}, {"kind":"samples","values":[[re,im],...]}
/// or {"kind":"const","value":[re,im]}.
Loop parse_loop(const json& j);
/// Fourier form listing the modes above 1e-15 of the largest.
json loop_to_json(const Loop& f);
/// CLI shorthand: "const:re[,im]", inline JSON, or a path to a JSON file.
json loop_spec_from_text(const std::string& text);

/// {"alpha": x}, {"named": "golden"|"silver"}, a bare number or a bare name.
RotationNumber parse_alpha(const json& j);

/// {"family":"q_lambda","lambda":loop}, {"family":"f_c","c":loop} or
/// {"family":"general","coeffs":[c_0,...,c_d]}; "coeffs" also works for the
/// first two. A map-level "alpha" overrides `fallback`.
QpfPolynomial parse_map(const json& j, const json& fallback_alpha = nullptr);
/// The lambda loop of a q_lambda descriptor.
Loop parse_lambda(const json& map);

cplx parse_complex(const json& j);
json complex_to_json(cplx z);
/// "re,im" or "re".
cplx parse_complex_text(const std::string& text);

/// Sorted keys, no whitespace, floating-point numbers with 17 significant digits.
std::string canonical_json(const json& j);
std::string sha256_hex(std::string_view data);

struct JobConfig {
  json map;      // map descriptor or null
  json alpha;    // alpha descriptor or null (golden)
  std::string task;
  json params = json::object();
  std::string output;  // not part of the content hash

  static JobConfig from_json(const json& j);
  json to_json() const;
  /// SHA-256 of the canonical form without the output path.
  std::string hash() const;
  RotationNumber rotation() const;
};

bool is_known_task(std::string_view task);

}  // namespace torusdyn
