#pragma once

#include <utility>
#include <vector>

#include "torusdyn/loop.hpp"

namespace torusdyn {

/// Zero-mean solution u of u(theta + alpha) - u(theta) = g(theta).
struct CohomologySolution {
  Loop u;
  double residual_sup = 0.0;      // measured on the grid after construction
  double smallest_divisor = 0.0;  // min |1 - e^{2 pi i k alpha}| over used modes
  int modes_used = 0;
};

inline constexpr double kNonzeroMeanTolerance = 1e-10;
inline constexpr double kSmallDivisorFloor = 1e-8;

/// Solves mode by mode, u_k = g_k / (e^{2 pi i k alpha} - 1) for
/// 0 < |k| <= k_max. Throws NonzeroMean when |mean g| >= 1e-10 and
/// SmallDivisorBreakdown when a used divisor drops below 1e-8.
CohomologySolution solve_cohomological(const Loop& g, const RotationNumber& alpha, int k_max);

/// Default truncation N/4.
CohomologySolution solve_cohomological(const Loop& g, const RotationNumber& alpha);

/// |1 - e^{2 pi i k alpha}| for k = 1..k_max.
std::vector<std::pair<int, double>> small_divisor_profile(double alpha, int k_max);
inline std::vector<std::pair<int, double>> small_divisor_profile(const RotationNumber& alpha,
                                                                 int k_max) {
  return small_divisor_profile(alpha.alpha(), k_max);
}

/// Record minima of a profile: the k whose divisor is smaller than every
/// divisor at a smaller k.
std::vector<int> record_minima(const std::vector<std::pair<int, double>>& profile);

}  // namespace torusdyn
