#pragma once

// Tail functionals of the Levy measure: nu-bar, truncated moments, and the
// Fubini representations of int x^2 nu(dx).

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "levyclt/errors.hpp"
#include "levyclt/integrate.hpp"
#include "levyclt/levy_model.hpp"
#include "levyclt/measure.hpp"

namespace levyclt {

enum class CrossCheck { off, on };

#if defined(LEVYCLT_ALWAYS_CROSS_CHECK) || !defined(NDEBUG)
inline constexpr CrossCheck default_cross_check = CrossCheck::on;
#else
inline constexpr CrossCheck default_cross_check = CrossCheck::off;
#endif

struct Window {
  enum class Kind { outside, inside };
  Kind kind = Kind::outside;
  double w = 1.0;

  static Window outside(double w) { return {Kind::outside, w}; }
  static Window inside(double w) { return {Kind::inside, w}; }
};

/// int_{window} x^k nu(dx) when signed_, else |x|^k.
struct TailIntegralRequest {
  int order = 0;
  Window window;
  bool signed_ = false;
};

namespace detail {

inline void check_request(const TailIntegralRequest& r) {
  if (r.order < 0 || r.order > 3) throw DomainError("moment order must be in {0, 1, 2, 3}");
  if (!(r.window.w > 0.0) || std::isnan(r.window.w)) throw DomainError("window must be positive");
}

inline std::pair<double, double> band_of(const Window& w) {
  return w.kind == Window::Kind::outside ? std::pair{w.w, infinity} : std::pair{0.0, w.w};
}

// log-space break points strictly inside (lo, hi), with the end points.
inline std::vector<double> log_points(const MeasureSpec& m, double lo, double hi) {
  std::vector<double> pts;
  pts.push_back(lo > 0.0 ? std::log(lo) : -infinity);
  for (double b : m.breakpoints()) {
    if (b > lo && b < hi) pts.push_back(std::log(b));
  }
  pts.push_back(std::isinf(hi) ? infinity : std::log(hi));
  return pts;
}

inline quad::Options identity_options() {
  quad::Options o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-300;
  o.max_intervals = 40000;
  return o;
}

inline double relative_spread(std::span<const double> values, double scale) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  for (double v : values) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return 0.0;
  return (*hi - *lo) / scale;
}

}  // namespace detail

struct CubicIdentity {
  double direct = 0.0;    // int_{(-w,w)} |x|^3 nu(dx)
  double via_tail = 0.0;  // -w^3 nu-bar(w) + 3 int_0^w x^2 nu-bar(x) dx
  double rel_dev = 0.0;
};

/// Evaluates both sides of the truncated third-moment identity.
inline CubicIdentity truncated_cubic_identity(const MeasureSpec& measure, double w) {
  if (!(w > 0.0)) throw DomainError("window must be positive");
  CubicIdentity out;
  out.direct = measure.band_moment(0.0, w, 3);
  const double boundary = w * w * w * measure.tail_mass(w);
  const auto pts = detail::log_points(measure, 0.0, w);
  const double integral = quad::integrate_value(
      [&](double y) { return measure.scaled_tail(y, 3); }, pts, detail::identity_options(), 1e-9);
  out.via_tail = -boundary + 3.0 * integral;
  const std::array<double, 2> v{out.direct, out.via_tail};
  out.rel_dev = detail::relative_spread(v, boundary);
  return out;
}

/// nu-bar(w) = nu(R \ (-w, w)).
inline double tail_mass(const LevyModel& model, double w) {
  if (!(w > 0.0)) throw DomainError("window must be positive");
  return model.measure().tail_mass(w);
}

/// Closed-form (or one-dimensional semi-analytic) evaluation of the request.
/// With CrossCheck::on, Inside/k=3 requests are also evaluated through the
/// nu-bar identity and must agree to 1e-6 relative.
inline double tail_moment(const TailIntegralRequest& request, const LevyModel& model,
                          CrossCheck check = default_cross_check) {
  detail::check_request(request);
  const auto [lo, hi] = detail::band_of(request.window);
  const double value = model.measure().band_moment(lo, hi, request.order, request.signed_);
  if (check == CrossCheck::on && request.window.kind == Window::Kind::inside &&
      request.order == 3 && !request.signed_) {
    const auto id = truncated_cubic_identity(model.measure(), request.window.w);
    if (id.rel_dev > 1e-6) {
      throw NumericalError("truncated third-moment identity violated at w = " +
                           std::to_string(request.window.w) + " (relative deviation " +
                           std::to_string(id.rel_dev) + ")");
    }
  }
  return value;
}

/// Generic path: integrates the density directly (in y = log|x|), ignoring
/// the family closed forms. Used to cross-check them.
inline double tail_moment_by_quadrature(const TailIntegralRequest& request,
                                        const MeasureSpec& measure) {
  detail::check_request(request);
  const auto [lo, hi] = detail::band_of(request.window);
  const auto pts = detail::log_points(measure, lo, hi);
  return quad::integrate_value(
      [&](double y) { return measure.log_density(y, request.order, request.signed_); }, pts,
      detail::identity_options(), 1e-8);
}

struct IdentityReport {
  std::array<double, 3> values{};  // int x^2 nu, int 2x nu-bar(x) dx, int nu-bar(sqrt x) dx
  double max_rel_dev = 0.0;
  bool passed = true;
};

/// Evaluates the three representations of I = int x^2 nu(dx) independently.
inline IdentityReport check_I_identities(const LevyModel& model, double tol) {
  const auto& m = model.measure();
  IdentityReport rep;
  if (m.trivial()) {
    rep.passed = 0.0 <= tol;
    return rep;
  }
  rep.values[0] = m.second_moment();

  // int_0^inf 2x nu-bar(x) dx with x = exp(y)
  const auto pts = detail::log_points(m, 0.0, infinity);
  rep.values[1] = quad::integrate_value([&](double y) { return 2.0 * m.scaled_tail(y, 2); }, pts,
                                        detail::identity_options(), 1e-9);

  // int_0^inf nu-bar(sqrt x) dx: plain x on [0, x0], v = log x beyond.
  double x0 = 1.0;
  std::vector<double> xs{0.0};
  for (double b : m.breakpoints()) {
    xs.push_back(b * b);
    x0 = std::max(x0, 4.0 * b * b);
  }
  xs.push_back(x0);
  std::sort(xs.begin(), xs.end());
  const double head = quad::integrate_value([&](double x) { return m.tail_mass(std::sqrt(x)); },
                                            xs, detail::identity_options(), 1e-9);
  const double tail = quad::integrate_value(
      [&](double v) { return m.scaled_tail(0.5 * v, 2); }, std::log(x0), infinity,
      detail::identity_options(), 1e-9);
  rep.values[2] = head + tail;

  rep.max_rel_dev = detail::relative_spread(rep.values, 0.0);
  rep.passed = rep.max_rel_dev <= tol;
  return rep;
}

}  // namespace levyclt
