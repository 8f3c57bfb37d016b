#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace levyclt {

/// Standard normal distribution function. Backed by std::erfc, which keeps
/// full relative precision in both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(x) without cancellation.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

/// Phi(b) - Phi(a) for a <= b, evaluated on the side that avoids cancellation.
inline double normal_interval(double a, double b) {
  if (a >= 0.0) return normal_sf(a) - normal_sf(b);
  if (b <= 0.0) return normal_cdf(b) - normal_cdf(a);
  return 1.0 - normal_cdf(a) - normal_sf(b);
}

/// Inverse of the upper tail: returns z with normal_sf(z) == q, q in (0, 1).
inline double normal_isf(double q) {
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

}  // namespace levyclt
