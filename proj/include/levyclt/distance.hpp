#pragma once

// Kolmogorov distance to centred Gaussian laws, and the exact discrepancy
// phi(a) = sup_x |Phi(x) - Phi(a x)| between two centred normals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "levyclt/errors.hpp"
#include "levyclt/normal.hpp"

namespace levyclt {

inline constexpr double default_alpha = 0.01;

struct DistanceEstimate {
  double value = 0.0;  // sup_x |F_n(x) - Phi(x / scale)|
  std::size_t n = 0;
  double dkw_slack = 0.0;
  double alpha = default_alpha;
};

/// Half-width of the DKW band at confidence 1 - alpha: sqrt(ln(2/alpha) / (2n)).
inline double dkw_slack(std::size_t n, double alpha = default_alpha) {
  if (n == 0) throw EmptySample();
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

/// One-sample KS statistic for samples already sorted ascending.
inline DistanceEstimate ks_against_normal_sorted(std::span<const double> sorted, double scale,
                                                 double alpha = default_alpha) {
  if (sorted.empty()) throw EmptySample();
  if (!(scale > 0.0)) throw NonpositiveScale();
  const double n = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i] / scale);
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    sup = std::max({sup, above, below});
  }
  return {std::clamp(sup, 0.0, 1.0), sorted.size(), dkw_slack(sorted.size(), alpha), alpha};
}

/// Exact one-sample KS statistic of the samples against Normal(0, scale^2).
inline DistanceEstimate ks_against_normal(std::span<const double> samples, double scale,
                                          double alpha = default_alpha) {
  if (samples.empty()) throw EmptySample();
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return ks_against_normal_sorted(sorted, scale, alpha);
}

/// Positive maximiser of |Phi(x) - Phi(a x)|: sqrt(2 log(1/a) / (1 - a^2)).
inline double z_crit(double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("z_crit: a must lie in (0, 1)");
  const double d = 1.0 - a;
  // log(1/a) = -log1p(-d), 1 - a^2 = d (2 - d); both stay accurate as a -> 1.
  return std::sqrt(-2.0 * std::log1p(-d) / (d * (2.0 - d)));
}

/// phi(a) = Phi(z(a)) - Phi(a z(a)); phi(1) = 0 by continuity.
inline double phi_discrepancy(double a) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("phi_discrepancy: a must lie in (0, 1]");
  if (a == 1.0) return 0.0;
  const double z = z_crit(a);
  return normal_interval(a * z, z);
}

}  // namespace levyclt
