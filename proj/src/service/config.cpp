#include "torusdyn/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "torusdyn/error.hpp"

namespace torusdyn {
namespace {

const std::array<std::string_view, 7> kTasks{"julia-fiber", "param-slice", "classify", "multiplier",
                                             "linearize",   "surgery",     "cohomology"};

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return j.get<double>();
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

// Library validation errors inside a descriptor are configuration errors.
template <class F>
auto as_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw ConfigError(e.what());
    throw;
  }
}

void write_canonical(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        write_canonical(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_canonical(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw ConfigError("non-finite number in configuration");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
      out += buf;
      break;
    }
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: {
      // Integers that a double represents exactly print as the same text as
      // the equal float would, so 1 and 1.0 hash alike.
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Loop parse_loop(const json& j) {
  if (!j.is_object()) throw ConfigError("loop descriptor must be an object");
  const std::string kind = member(j, "kind").is_string() ? j.at("kind").get<std::string>() : "";
  return as_config([&]() -> Loop {
    if (kind == "fourier") {
      const json& coeffs = member(j, "coeffs");
      if (!coeffs.is_array()) throw ConfigError("fourier coeffs must be an array");
      std::vector<std::pair<int, cplx>> modes;
      int kmax = 0;
      for (const auto& c : coeffs) {
        if (!c.is_array() || c.size() < 2 || c.size() > 3 || !c[0].is_number_integer()) {
          throw ConfigError("fourier coefficient must be [k, re, im]");
        }
        const int k = c[0].get<int>();
        const double im = c.size() == 3 ? number(c[2], "imaginary part") : 0.0;
        modes.emplace_back(k, cplx(number(c[1], "real part"), im));
        kmax = std::max(kmax, std::abs(k));
      }
      std::size_t n = kConfigSamples;
      while (n < 4 * static_cast<std::size_t>(kmax + 1)) n *= 2;
      if (j.contains("n")) {
        if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 8) {
          throw ConfigError("loop size n must be an integer >= 8");
        }
        n = j.at("n").get<std::size_t>();
        if (n <= 2 * static_cast<std::size_t>(kmax)) throw ConfigError("loop size too small for its modes");
      }
      return Loop::from_modes(modes, n);
    }
    if (kind == "samples") {
      const json& values = member(j, "values");
      if (!values.is_array()) throw ConfigError("samples values must be an array");
      std::vector<cplx> s;
      for (const auto& v : values) s.push_back(parse_complex(v));
      return Loop::from_samples(std::move(s));
    }
    if (kind == "const") {
      std::size_t n = kConfigSamples;
      if (j.contains("n")) n = j.at("n").get<std::size_t>();
      return Loop::constant(parse_complex(member(j, "value")), n);
    }
    throw ConfigError("unknown loop kind '" + kind + "'");
  });
}

json loop_to_json(const Loop& f) {
  json coeffs = json::array();
  const auto c = f.coefficients();
  double peak = 0.0;
  for (const auto& v : c) peak = std::max(peak, std::abs(v));
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (std::abs(c[j]) > 1e-15 * peak) {
      coeffs.push_back({mode_of_slot(j, c.size()), c[j].real(), c[j].imag()});
    }
  }
  std::sort(coeffs.begin(), coeffs.end(), [](const json& a, const json& b) { return a[0] < b[0]; });
  return {{"kind", "fourier"}, {"coeffs", coeffs}, {"n", f.size()}};
}

json loop_spec_from_text(const std::string& text) {
  if (text.rfind("const:", 0) == 0) {
    return {{"kind", "const"}, {"value", complex_to_json(parse_complex_text(text.substr(6)))}};
  }
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("invalid loop JSON: ") + e.what());
    }
  }
  std::ifstream in(text);
  if (!in) throw ConfigError("cannot read loop descriptor '" + text + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + text + "': " + e.what());
  }
}

RotationNumber parse_alpha(const json& j) {
  return as_config([&]() -> RotationNumber {
    if (j.is_null()) return RotationNumber::golden();
    if (j.is_number()) return RotationNumber(j.get<double>());
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "golden" || s == "silver") return RotationNumber::named(s);
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return RotationNumber(v);
      } catch (const std::exception&) {
      }
      throw ConfigError("unknown alpha '" + s + "'");
    }
    if (j.is_object() && j.contains("alpha")) return RotationNumber(number(j.at("alpha"), "alpha"));
    if (j.is_object() && j.contains("named")) {
      if (!j.at("named").is_string()) throw ConfigError("named alpha must be a string");
      const auto s = j.at("named").get<std::string>();
      if (s != "golden" && s != "silver") throw ConfigError("unknown alpha preset '" + s + "'");
      return RotationNumber::named(s);
    }
    throw ConfigError("alpha descriptor must be {\"alpha\": x} or {\"named\": name}");
  });
}

Loop parse_lambda(const json& map) {
  if (!map.is_object()) throw ConfigError("map descriptor must be an object");
  if (map.contains("lambda")) return parse_loop(map.at("lambda"));
  const json& coeffs = member(map, "coeffs");
  if (!coeffs.is_array() || coeffs.size() != 1) throw ConfigError("q_lambda takes one coefficient loop");
  return parse_loop(coeffs[0]);
}

QpfPolynomial parse_map(const json& j, const json& fallback_alpha) {
  if (!j.is_object()) throw ConfigError("map descriptor must be an object");
  const json& fam = member(j, "family");
  if (!fam.is_string()) throw ConfigError("map family must be a string");
  const auto family = fam.get<std::string>();
  const RotationNumber alpha = parse_alpha(j.contains("alpha") ? j.at("alpha") : fallback_alpha);
  if (family == "q_lambda") return make_quadratic(parse_lambda(j), alpha);
  if (family == "f_c") {
    Loop c;
    if (j.contains("c")) {
      c = parse_loop(j.at("c"));
    } else {
      const json& coeffs = member(j, "coeffs");
      if (!coeffs.is_array() || coeffs.size() != 1) throw ConfigError("f_c takes one coefficient loop");
      c = parse_loop(coeffs[0]);
    }
    return QpfPolynomial({c, Loop::constant(0.0, c.size()), Loop::constant(1.0, c.size())}, alpha);
  }
  if (family == "general") {
    const json& coeffs = member(j, "coeffs");
    if (!coeffs.is_array()) throw ConfigError("general coeffs must be an array of loops");
    std::vector<Loop> loops;
    for (const auto& c : coeffs) loops.push_back(parse_loop(c));
    return as_config([&] { return QpfPolynomial(std::move(loops), alpha); });
  }
  throw ConfigError("unknown map family '" + family + "'");
}

cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && (j.size() == 1 || j.size() == 2)) {
    return {number(j[0], "real part"), j.size() == 2 ? number(j[1], "imaginary part") : 0.0};
  }
  throw ConfigError("complex number must be [re, im] or a number");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx parse_complex_text(const std::string& text) {
  const auto comma = text.find(',');
  try {
    std::size_t used = 0;
    const std::string re_text = text.substr(0, comma);
    const double re = std::stod(re_text, &used);
    if (used != re_text.size()) throw ConfigError("");
    double im = 0.0;
    if (comma != std::string::npos) {
      const std::string im_text = text.substr(comma + 1);
      im = std::stod(im_text, &used);
      if (used != im_text.size()) throw ConfigError("");
    }
    return {re, im};
  } catch (const std::exception&) {
    throw ConfigError("expected a complex number 're,im', got '" + text + "'");
  }
}

std::string canonical_json(const json& j) {
  std::string out;
  write_canonical(j, out);
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

bool is_known_task(std::string_view task) {
  return std::find(kTasks.begin(), kTasks.end(), task) != kTasks.end();
}

JobConfig JobConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("job config must be an object");
  JobConfig c;
  const json& task = member(j, "task");
  if (!task.is_string() || !is_known_task(task.get<std::string>())) {
    throw ConfigError("unknown task kind " + task.dump());
  }
  c.task = task.get<std::string>();
  if (j.contains("map")) c.map = j.at("map");
  if (j.contains("alpha")) c.alpha = j.at("alpha");
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("params must be an object");
    c.params = j.at("params");
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("output must be a path string");
    c.output = j.at("output").get<std::string>();
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "task" && it.key() != "map" && it.key() != "alpha" && it.key() != "params" &&
        it.key() != "output") {
      throw ConfigError("unknown job config field '" + it.key() + "'");
    }
  }
  return c;
}

json JobConfig::to_json() const {
  json j = {{"task", task}, {"map", map}, {"alpha", alpha}, {"params", params}};
  if (!output.empty()) j["output"] = output;
  return j;
}

std::string JobConfig::hash() const {
  json j = to_json();
  j.erase("output");
  return sha256_hex(canonical_json(j));
}

RotationNumber JobConfig::rotation() const {
  if (map.is_object() && map.contains("alpha")) return parse_alpha(map.at("alpha"));
  return parse_alpha(alpha);
}

}  // namespace torusdyn
