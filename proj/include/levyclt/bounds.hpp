#pragma once

// Computable envelope K(t) <= P(J_t^c) + Bbar(t) + Cbar(t) for the Kolmogorov
// distance between X_t / sqrt(t) and Normal(0, sigma_t^2).

#include <cmath>

#include "levyclt/levy_model.hpp"
#include "levyclt/quadrature.hpp"

namespace levyclt {

/// Best known universal constant of the i.i.d. Berry-Esseen inequality.
inline constexpr double default_berry_esseen_constant = 0.4748;

struct BoundsConfig {
  double berry_esseen_constant = default_berry_esseen_constant;
  CrossCheck cross_check = default_cross_check;
};

struct BoundBreakdown {
  double t = 1.0;
  double p_big_jump = 0.0;    // P(J_t^c)
  double berry_esseen = 0.0;  // Bbar(t)
  double centering = 0.0;     // Cbar(t)
  double total = 0.0;
};

/// t * nu-bar(kappa sqrt t): the expected number of big jumps on [0, t].
inline double big_jump_intensity(const LevyModel& model, double t) {
  detail::require_time(t);
  return t * model.measure().tail_mass(model.kappa() * std::sqrt(t));
}

/// P(J_t^c) = 1 - exp(-t nu-bar(kappa sqrt t)).
inline double prob_big_jump(const LevyModel& model, double t) {
  return -std::expm1(-big_jump_intensity(model, t));
}

/// The linearisation P(J_t^c) <= t nu-bar(kappa sqrt t).
inline double prob_big_jump_linear(const LevyModel& model, double t) {
  return big_jump_intensity(model, t);
}

/// Bbar(t) = 4 c / (sqrt(t) sigma_1^3) * int_{(-kappa sqrt t, kappa sqrt t)} |x|^3 nu(dx).
inline double berry_esseen_term(const LevyModel& model, double t, const BoundsConfig& cfg = {}) {
  detail::require_time(t);
  const double window = model.kappa() * std::sqrt(t);
  const double cubic = tail_moment({3, Window::inside(window), false}, model, cfg.cross_check);
  if (cubic == 0.0) return 0.0;
  const double s1 = model.sigma1();
  return 4.0 * cfg.berry_esseen_constant * cubic / (std::sqrt(t) * s1 * s1 * s1);
}

/// Cbar(t) = |mu_t| / (sigma_1 sqrt t).
inline double centering_term(const LevyModel& model, double t) {
  return std::fabs(mu_t(model, t)) / (model.sigma1() * std::sqrt(t));
}

inline BoundBreakdown total_bound(const LevyModel& model, double t, const BoundsConfig& cfg = {}) {
  BoundBreakdown b;
  b.t = t;
  b.p_big_jump = prob_big_jump(model, t);
  b.berry_esseen = berry_esseen_term(model, t, cfg);
  b.centering = centering_term(model, t);
  b.total = b.p_big_jump + b.berry_esseen + b.centering;
  return b;
}

}  // namespace levyclt
