#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace torusdyn {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr std::size_t kDefaultSamples = 1024;

/// A continuous loop T^1 -> C, stored dually as N uniform samples at
/// theta_j = j/N and as the N Fourier coefficients c_k, k in [-N/2, N/2).
///
/// Pointwise (nonlinear) operations act on the samples; shifts act on the
/// coefficients. Whichever representation a loop was built from is kept
/// verbatim, the other is derived with one FFT.
class Loop {
 public:
  /// The zero loop on the default grid.
  Loop();

  static Loop from_samples(std::vector<cplx> samples);
  /// Coefficients in FFT order: index j holds k = j for j < N/2, k = j - N otherwise.
  static Loop from_coefficients(std::vector<cplx> coeffs);
  /// Sparse spectrum given as (k, c_k) pairs; repeated k accumulate.
  static Loop from_modes(std::span<const std::pair<int, cplx>> modes,
                         std::size_t n = kDefaultSamples);
  static Loop from_modes(std::initializer_list<std::pair<int, cplx>> modes,
                         std::size_t n = kDefaultSamples);
  static Loop constant(cplx value, std::size_t n = kDefaultSamples);
  /// Samples f at the grid angles (f receives theta in turns).
  static Loop from_function(const std::function<cplx(double)>& f,
                            std::size_t n = kDefaultSamples);

  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const cplx> samples() const noexcept { return samples_; }
  std::span<const cplx> coefficients() const noexcept { return coeffs_; }
  cplx sample(std::size_t j) const { return samples_[j % samples_.size()]; }
  /// c_k for k in [-N/2, N/2); zero outside that band.
  cplx coefficient(int k) const;
  double angle(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(samples_.size());
  }

  /// Fourier-sum evaluation at an arbitrary angle (in turns). Grid angles
  /// return the stored sample.
  cplx operator()(double theta) const;

  /// Values at theta_i = i/m + shift for i < m, by folding the spectrum onto
  /// an m-point grid (m a power of two).
  std::vector<cplx> values_on_grid(std::size_t m, double shift) const;

  double sup_norm() const;
  double min_modulus() const;
  /// Highest |k| carrying a non-negligible coefficient.
  int bandwidth() const;

  /// Spectral zero-padding (or truncation) to n samples.
  Loop resampled(std::size_t n) const;
  Loop refined(std::size_t factor) const { return resampled(size() * factor); }

  Loop map(const std::function<cplx(cplx)>& f) const;
  Loop conj() const;

  Loop& operator+=(const Loop& other);
  Loop& operator-=(const Loop& other);
  Loop& operator*=(cplx s);

  friend Loop operator+(Loop a, const Loop& b) { return a += b; }
  friend Loop operator-(Loop a, const Loop& b) { return a -= b; }
  friend Loop operator*(Loop a, cplx s) { return a *= s; }
  friend Loop operator*(cplx s, Loop a) { return a *= s; }
  friend Loop operator-(Loop a) { return a *= cplx(-1.0); }
  /// Pointwise product and quotient on samples; mismatched grids are
  /// spectrally lifted to the finer one.
  friend Loop operator*(const Loop& a, const Loop& b);
  friend Loop operator/(const Loop& a, const Loop& b);
  friend Loop operator+(Loop a, cplx s);

 private:
  Loop(std::vector<cplx> samples, std::vector<cplx> coeffs);
  void index_active_modes();

  std::vector<cplx> samples_;
  std::vector<cplx> coeffs_;
  std::vector<int> active_;  // signed mode numbers used by operator()
};

/// Frequency index k of FFT slot j on an n-point grid.
inline int mode_of_slot(std::size_t j, std::size_t n) {
  return j < n / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n);
}

struct Convergent {
  long long p = 0;
  long long q = 1;
};

/// An irrational frequency alpha in (0,1) together with its continued-fraction
/// convergents and a fitted Diophantine pair (delta, tau).
class RotationNumber {
 public:
  explicit RotationNumber(double alpha, long long max_denominator = 1'000'000);

  static RotationNumber golden();
  /// "golden" -> (sqrt5-1)/2, "silver" -> sqrt2-1.
  static RotationNumber named(std::string_view name);

  double alpha() const noexcept { return alpha_; }
  std::span<const Convergent> convergents() const noexcept { return convergents_; }
  const std::vector<long long>& partial_quotients() const noexcept { return quotients_; }
  double delta() const noexcept { return delta_; }
  double tau() const noexcept { return tau_; }
  /// True when the expansion terminated (alpha is a dyadic rational here).
  bool terminated() const noexcept { return terminated_; }

 private:
  double alpha_;
  std::vector<long long> quotients_;
  std::vector<Convergent> convergents_;
  double delta_ = 0.0;
  double tau_ = 2.0;
  bool terminated_ = false;
};

/// Integer winding number of a non-vanishing loop about 0, measured on a
/// 4x spectrally refined grid.
int winding_number(const Loop& f);

/// Continuous single-valued logarithm of a zero-winding loop, branch fixed
/// by Im L(0) in (-pi, pi].
Loop continuous_log(const Loop& f);

/// The k = 0 Fourier coefficient.
cplx circle_mean(const Loop& f);

/// g(theta) = f(theta + shift), computed spectrally.
Loop shift(const Loop& f, double shift);
inline Loop rotate(const Loop& f, const RotationNumber& alpha) {
  return shift(f, alpha.alpha());
}

/// e^{2 pi i k theta} sampled on n points.
Loop fourier_mode(int k, std::size_t n = kDefaultSamples);

/// Representative of x mod 1 in (-1/2, 1/2].
double wrap_half_turn(double x);
/// Distance on R/Z.
double circle_distance(double a, double b);

}  // namespace torusdyn
