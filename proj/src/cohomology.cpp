#include "torusdyn/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "torusdyn/error.hpp"

namespace torusdyn {
namespace {

cplx divisor(int k, double alpha) {
  const double t = kTwoPi * (k * alpha - std::floor(k * alpha));
  return cplx(std::cos(t), std::sin(t)) - 1.0;
}

}  // namespace

CohomologySolution solve_cohomological(const Loop& g, const RotationNumber& alpha, int k_max) {
  const int n = static_cast<int>(g.size());
  if (k_max < 0 || k_max > n / 2) {
    fail(ErrorCode::InvalidArgument,
         "k_max must lie in [0, N/2] = [0, " + std::to_string(n / 2) + "]");
  }
  const cplx mean = circle_mean(g);
  if (std::abs(mean) >= kNonzeroMeanTolerance) {
    fail(ErrorCode::NonzeroMean, "right-hand side has mean of modulus " +
                                     std::to_string(std::abs(mean)) +
                                     "; subtract it before solving");
  }

  CohomologySolution sol;
  sol.smallest_divisor = std::numeric_limits<double>::infinity();
  std::vector<cplx> coeffs(g.size(), 0.0);
  for (std::size_t j = 1; j < g.size(); ++j) {
    const int k = mode_of_slot(j, g.size());
    if (std::abs(k) > k_max) continue;
    const cplx d = divisor(k, alpha.alpha());
    const double size = std::abs(d);
    if (size < kSmallDivisorFloor) {
      fail(ErrorCode::SmallDivisorBreakdown,
           "divisor |1 - e^{2 pi i k alpha}| = " + std::to_string(size) + " at k = " +
               std::to_string(k));
    }
    sol.smallest_divisor = std::min(sol.smallest_divisor, size);
    coeffs[j] = g.coefficients()[j] / d;
    ++sol.modes_used;
  }
  sol.u = Loop::from_coefficients(std::move(coeffs));

  const Loop residual = rotate(sol.u, alpha) - sol.u - g;
  sol.residual_sup = residual.sup_norm();
  return sol;
}

CohomologySolution solve_cohomological(const Loop& g, const RotationNumber& alpha) {
  return solve_cohomological(g, alpha, static_cast<int>(g.size() / 4));
}

std::vector<std::pair<int, double>> small_divisor_profile(double alpha, int k_max) {
  if (k_max < 1) fail(ErrorCode::InvalidArgument, "k_max must be >= 1");
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) out.emplace_back(k, std::abs(divisor(k, alpha)));
  return out;
}

std::vector<int> record_minima(const std::vector<std::pair<int, double>>& profile) {
  std::vector<int> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [k, d] : profile) {
    if (d < best) {
      best = d;
      out.push_back(k);
    }
  }
  return out;
}

}  // namespace torusdyn
