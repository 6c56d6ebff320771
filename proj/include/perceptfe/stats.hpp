#pragma once

#include <cmath>

namespace pfe {

// 95% intervals use the normal approximation with a fixed 1.96 multiplier
// in every estimator family.
inline constexpr double kZ95 = 1.96;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Two-sided p-value against the standard normal reference.
inline double two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

inline double logistic(double x) {
  if (x >= 0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace pfe
