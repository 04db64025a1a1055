#include "torusdyn/loop.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "torusdyn/error.hpp"

namespace torusdyn {
namespace {

// Coefficients below this fraction of the largest one are FFT round-off and
// are skipped by off-grid evaluation.
constexpr double kActiveModeFloor = 1e-15;
constexpr double kVanishingModulus = 1e-12;
constexpr double kAliasingJump = std::numbers::pi / 2.0;
constexpr std::size_t kWindingRefinement = 4;

void check_grid_size(std::size_t n) {
  if (n < 8 || !std::has_single_bit(n)) {
    fail(ErrorCode::InvalidArgument,
         "loop grid size must be a power of two >= 8, got " + std::to_string(n));
  }
}

double frac(double x) { return x - std::floor(x); }

cplx unit_phase(double turns) {
  const double t = kTwoPi * frac(turns);
  return {std::cos(t), std::sin(t)};
}

std::size_t slot_of_mode(int k, std::size_t n) {
  const auto nn = static_cast<long long>(n);
  return static_cast<std::size_t>(((k % nn) + nn) % nn);
}

// Samples of a 4x refined loop plus the unwrapped phase increments between
// neighbours; validates non-vanishing and aliasing.
struct PhaseWalk {
  std::vector<cplx> refined;
  std::vector<double> increments;
  double total = 0.0;
};

PhaseWalk walk_phase(const Loop& f) {
  PhaseWalk walk;
  const Loop fine = f.refined(kWindingRefinement);
  walk.refined.assign(fine.samples().begin(), fine.samples().end());
  const auto& r = walk.refined;
  const std::size_t n = r.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(r[j]) < kVanishingModulus) {
      fail(ErrorCode::NonVanishingViolation,
           "loop vanishes near theta = " + std::to_string(static_cast<double>(j) / n));
    }
  }
  walk.increments.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = std::arg(r[(j + 1) % n] / r[j]);
    if (std::abs(d) > kAliasingJump) {
      fail(ErrorCode::AliasingSuspected,
           "phase jump of " + std::to_string(d) + " rad between adjacent samples; use a finer grid");
    }
    walk.increments[j] = d;
    walk.total += d;
  }
  return walk;
}

}  // namespace

Loop::Loop() : Loop(constant(0.0)) {}

Loop::Loop(std::vector<cplx> samples, std::vector<cplx> coeffs)
    : samples_(std::move(samples)), coeffs_(std::move(coeffs)) {
  index_active_modes();
}

void Loop::index_active_modes() {
  active_.clear();
  double peak = 0.0;
  for (const auto& c : coeffs_) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return;
  const std::size_t n = coeffs_.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(coeffs_[j]) > kActiveModeFloor * peak) active_.push_back(mode_of_slot(j, n));
  }
  std::sort(active_.begin(), active_.end());
}

Loop Loop::from_samples(std::vector<cplx> samples) {
  check_grid_size(samples.size());
  auto coeffs = detail::forward_dft(samples);
  return Loop(std::move(samples), std::move(coeffs));
}

Loop Loop::from_coefficients(std::vector<cplx> coeffs) {
  check_grid_size(coeffs.size());
  auto samples = detail::inverse_dft(coeffs);
  return Loop(std::move(samples), std::move(coeffs));
}

Loop Loop::from_modes(std::span<const std::pair<int, cplx>> modes, std::size_t n) {
  check_grid_size(n);
  std::vector<cplx> coeffs(n, 0.0);
  const int half = static_cast<int>(n / 2);
  for (const auto& [k, c] : modes) {
    if (k < -half || k >= half) {
      fail(ErrorCode::InvalidArgument,
           "mode " + std::to_string(k) + " outside the band of an " + std::to_string(n) + "-point grid");
    }
    coeffs[slot_of_mode(k, n)] += c;
  }
  return from_coefficients(std::move(coeffs));
}

Loop Loop::from_modes(std::initializer_list<std::pair<int, cplx>> modes, std::size_t n) {
  return from_modes(std::span<const std::pair<int, cplx>>(modes.begin(), modes.size()), n);
}

Loop Loop::constant(cplx value, std::size_t n) {
  check_grid_size(n);
  std::vector<cplx> coeffs(n, 0.0);
  coeffs[0] = value;
  return Loop(std::vector<cplx>(n, value), std::move(coeffs));
}

Loop Loop::from_function(const std::function<cplx(double)>& f, std::size_t n) {
  check_grid_size(n);
  std::vector<cplx> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = f(static_cast<double>(j) / static_cast<double>(n));
  return from_samples(std::move(s));
}

cplx Loop::coefficient(int k) const {
  const int half = static_cast<int>(size() / 2);
  if (k < -half || k >= half) return 0.0;
  return coeffs_[slot_of_mode(k, size())];
}

cplx Loop::operator()(double theta) const {
  const double t = frac(theta);
  const double x = t * static_cast<double>(size());
  if (x == std::floor(x)) return samples_[static_cast<std::size_t>(x) % size()];
  if (active_.empty()) return 0.0;

  const cplx step = unit_phase(t);
  cplx sum = 0.0;
  cplx phase = unit_phase(active_.front() * t);
  int prev = active_.front();
  int since_reseed = 0;
  for (const int k : active_) {
    const int gap = k - prev;
    if (gap > 4 || since_reseed >= 64) {
      phase = unit_phase(k * t);
      since_reseed = 0;
    } else {
      for (int g = 0; g < gap; ++g) phase *= step;
      since_reseed += gap;
    }
    prev = k;
    sum += coeffs_[slot_of_mode(k, size())] * phase;
  }
  return sum;
}

std::vector<cplx> Loop::values_on_grid(std::size_t m, double shift_turns) const {
  if (m == 0 || !std::has_single_bit(m)) {
    fail(ErrorCode::InvalidArgument, "values_on_grid needs a power-of-two grid");
  }
  std::vector<cplx> bins(m, 0.0);
  for (const int k : active_) {
    bins[slot_of_mode(k, m)] += coeffs_[slot_of_mode(k, size())] * unit_phase(k * shift_turns);
  }
  if (m == 1) return bins;
  return detail::inverse_dft(bins);
}

double Loop::sup_norm() const {
  double best = 0.0;
  for (const auto& s : samples_) best = std::max(best, std::abs(s));
  return best;
}

double Loop::min_modulus() const {
  double best = std::abs(samples_.front());
  for (const auto& s : samples_) best = std::min(best, std::abs(s));
  return best;
}

int Loop::bandwidth() const {
  int band = 0;
  for (const int k : active_) band = std::max(band, std::abs(k));
  return band;
}

Loop Loop::resampled(std::size_t n) const {
  check_grid_size(n);
  if (n == size()) return *this;
  std::vector<cplx> out(n, 0.0);
  const int half = static_cast<int>(std::min(n, size()) / 2);
  for (int k = -half; k < half; ++k) out[slot_of_mode(k, n)] = coefficient(k);
  return from_coefficients(std::move(out));
}

Loop Loop::map(const std::function<cplx(cplx)>& f) const {
  std::vector<cplx> s(size());
  for (std::size_t j = 0; j < size(); ++j) s[j] = f(samples_[j]);
  return from_samples(std::move(s));
}

Loop Loop::conj() const { return map([](cplx z) { return std::conj(z); }); }

namespace {

std::pair<Loop, Loop> common_grid(const Loop& a, const Loop& b) {
  const std::size_t n = std::max(a.size(), b.size());
  return {a.resampled(n), b.resampled(n)};
}

}  // namespace

Loop& Loop::operator+=(const Loop& other) {
  if (other.size() != size()) {
    auto [a, b] = common_grid(*this, other);
    return *this = a += b;
  }
  for (std::size_t j = 0; j < size(); ++j) {
    samples_[j] += other.samples_[j];
    coeffs_[j] += other.coeffs_[j];
  }
  index_active_modes();
  return *this;
}

Loop& Loop::operator-=(const Loop& other) { return *this += other * cplx(-1.0); }

Loop& Loop::operator*=(cplx s) {
  for (auto& v : samples_) v *= s;
  for (auto& c : coeffs_) c *= s;
  index_active_modes();
  return *this;
}

Loop operator+(Loop a, cplx s) {
  for (auto& v : a.samples_) v += s;
  a.coeffs_[0] += s;
  a.index_active_modes();
  return a;
}

Loop operator*(const Loop& a, const Loop& b) {
  auto [x, y] = common_grid(a, b);
  std::vector<cplx> s(x.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = x.samples()[j] * y.samples()[j];
  return Loop::from_samples(std::move(s));
}

Loop operator/(const Loop& a, const Loop& b) {
  auto [x, y] = common_grid(a, b);
  std::vector<cplx> s(x.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = x.samples()[j] / y.samples()[j];
  return Loop::from_samples(std::move(s));
}

// ---------------------------------------------------------------------------

RotationNumber::RotationNumber(double alpha, long long max_denominator) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::InvalidArgument, "rotation number must lie in (0,1), got " + std::to_string(alpha));
  }
  // Exact Euclid on the binary fraction alpha = num / den.
  int exponent = 0;
  const double mantissa = std::frexp(alpha, &exponent);
  if (exponent < -70) fail(ErrorCode::InvalidArgument, "rotation number too small");
  __int128 num = static_cast<__int128>(std::ldexp(mantissa, 53));
  __int128 den = static_cast<__int128>(1) << (53 - exponent);

  long long p_prev = 1, q_prev = 0, p = 0, q = 1;
  // a_0 = 0 since alpha < 1.
  quotients_.push_back(0);
  convergents_.push_back({0, 1});
  std::swap(num, den);  // continue with den/num = 1/alpha
  while (den != 0) {
    const __int128 a = num / den;
    const __int128 r = num % den;
    const __int128 p_next = a * p + p_prev;
    const __int128 q_next = a * q + q_prev;
    if (q_next > max_denominator) break;
    quotients_.push_back(static_cast<long long>(a));
    p_prev = p;
    q_prev = q;
    p = static_cast<long long>(p_next);
    q = static_cast<long long>(q_next);
    convergents_.push_back({p, q});
    num = den;
    den = r;
  }
  terminated_ = (den == 0);

  // tau = 2 + max log(1/(q^2 |alpha - p/q|)) / log q over q >= 2, delta just
  // below min q^tau |alpha - p/q| so the bound holds strictly.
  double tau = 2.0;
  bool any = false;
  for (const auto& c : convergents_) {
    const double err = std::abs(alpha_ * static_cast<double>(c.q) - static_cast<double>(c.p)) /
                       static_cast<double>(c.q);
    if (c.q < 2 || err == 0.0) continue;
    const double qd = static_cast<double>(c.q);
    tau = std::max(tau, std::log(1.0 / (qd * qd * err)) / std::log(qd) + 2.0);
    any = true;
  }
  tau_ = tau;
  double delta = std::numeric_limits<double>::infinity();
  for (const auto& c : convergents_) {
    const double err = std::abs(alpha_ * static_cast<double>(c.q) - static_cast<double>(c.p)) /
                       static_cast<double>(c.q);
    if (err == 0.0) continue;
    delta = std::min(delta, std::pow(static_cast<double>(c.q), tau_) * err);
  }
  delta_ = (any || std::isfinite(delta)) ? delta * (1.0 - 1e-9) : 0.0;
}

RotationNumber RotationNumber::golden() { return RotationNumber((std::sqrt(5.0) - 1.0) / 2.0); }

RotationNumber RotationNumber::named(std::string_view name) {
  if (name == "golden") return golden();
  if (name == "silver") return RotationNumber(std::sqrt(2.0) - 1.0);
  fail(ErrorCode::InvalidArgument, "unknown rotation number preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

int winding_number(const Loop& f) {
  const auto walk = walk_phase(f);
  return static_cast<int>(std::lround(walk.total / kTwoPi));
}

Loop continuous_log(const Loop& f) {
  const auto walk = walk_phase(f);
  const long w = std::lround(walk.total / kTwoPi);
  if (w != 0) {
    fail(ErrorCode::NonzeroWinding,
         "continuous logarithm needs winding 0, loop winds " + std::to_string(w) + " times");
  }
  const auto& r = walk.refined;
  const std::size_t stride = r.size() / f.size();
  std::vector<cplx> logs(f.size());
  double arg = std::arg(r[0]);
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (j % stride == 0) logs[j / stride] = {std::log(std::abs(r[j])), arg};
    arg += walk.increments[j];
  }
  return Loop::from_samples(std::move(logs));
}

cplx circle_mean(const Loop& f) { return f.coefficients()[0]; }

Loop shift(const Loop& f, double s) {
  const std::size_t n = f.size();
  std::vector<cplx> coeffs(f.coefficients().begin(), f.coefficients().end());
  for (std::size_t j = 1; j < n; ++j) coeffs[j] *= unit_phase(mode_of_slot(j, n) * s);
  return Loop::from_coefficients(std::move(coeffs));
}

Loop fourier_mode(int k, std::size_t n) { return Loop::from_modes({{k, 1.0}}, n); }

double wrap_half_turn(double x) {
  double r = x - std::floor(x);  // [0,1)
  if (r > 0.5) r -= 1.0;
  return r;
}

double circle_distance(double a, double b) { return std::abs(wrap_half_turn(a - b)); }

}  // namespace torusdyn
