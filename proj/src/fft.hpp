#pragma once

#include <complex>
#include <vector>

namespace torusdyn::detail {

/// Coefficients c_k = (1/N) sum_j f_j e^{-2 pi i k j / N}, FFT order.
std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& samples);
/// Samples f_j = sum_k c_k e^{2 pi i k j / N}.
std::vector<std::complex<double>> inverse_dft(const std::vector<std::complex<double>>& coeffs);

}  // namespace torusdyn::detail
