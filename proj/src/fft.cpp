#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace torusdyn::detail {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
fftw_plan cached_plan(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto [it, inserted] = plans.try_emplace({n, sign}, nullptr);
  if (inserted) {
    std::vector<std::complex<double>> in(n), out(n);
    it->second = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                  reinterpret_cast<fftw_complex*>(out.data()), sign,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  return it->second;
}

std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& in, int sign) {
  std::vector<std::complex<double>> out(in.size());
  if (in.empty()) return out;
  auto input = in;  // fftw_execute_dft takes a non-const pointer
  fftw_execute_dft(cached_plan(static_cast<int>(in.size()), sign),
                   reinterpret_cast<fftw_complex*>(input.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& samples) {
  auto out = run(samples, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<std::complex<double>> inverse_dft(const std::vector<std::complex<double>>& coeffs) {
  return run(coeffs, FFTW_BACKWARD);
}

}  // namespace torusdyn::detail
