#pragma once

// Parametric Levy measures. Every supported family has finite total mass, so
// each one is a compound Poisson jump law plus closed-form (or one-dimensional
// semi-analytic) tail functionals.
//
// Magnitude windows are half-open: band_moment(lo, hi, ...) integrates over
// lo <= |x| < hi, which makes tail_mass(w) = nu(R \ (-w, w)).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levyclt/errors.hpp"
#include "levyclt/integrate.hpp"
#include "levyclt/normal.hpp"

namespace levyclt {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class Side { positive, negative, symmetric };

/// c * |x|^-(p+1) on |x| >= cut, on the chosen side(s).
struct PowerTail {
  double amplitude = 1.0;
  double index = 3.0;
  double cut = 1.0;
  Side side = Side::positive;
};

/// c * |x|^-3 * (log|x|)^-gamma on |x| >= e, on the chosen side(s).
struct LogPerturbedPowerTail {
  double gamma = 3.0;
  double amplitude = 1.0;
  Side side = Side::positive;
  double mass_per_side = 0.0;  // derived at construction
};

/// Compound Poisson with rate lambda and Normal(mean, sd^2) jump sizes.
struct GaussianJumps {
  double rate = 1.0;
  double mean = 0.0;
  double sd = 1.0;
};

using Component = std::variant<GaussianJumps, PowerTail, LogPerturbedPowerTail>;

enum class Family {
  zero,
  compound_poisson_parametric,
  power_tail,
  log_perturbed_power_tail,
  two_sided_mixture
};

/// Analytic verdict on the finiteness of an improper moment integral.
struct MomentVerdict {
  enum class Status { finite, infinite, unknown };
  Status status = Status::unknown;
  std::optional<double> value;
};

namespace detail {

inline double side_factor(Side side, int k, bool signed_) {
  const double pos = side == Side::negative ? 0.0 : 1.0;
  const double neg = side == Side::positive ? 0.0 : 1.0;
  const double neg_sign = (signed_ && (k % 2 == 1)) ? -1.0 : 1.0;
  return pos + neg_sign * neg;
}

inline double side_count(Side side) { return side == Side::symmetric ? 2.0 : 1.0; }

inline const char* side_name(Side side) {
  switch (side) {
    case Side::positive:
      return "positive";
    case Side::negative:
      return "negative";
    case Side::symmetric:
      return "symmetric";
  }
  return "?";
}

// ---- PowerTail -----------------------------------------------------------

inline double magnitude_band(const PowerTail& m, double lo, double hi, int k) {
  const double a = std::max(lo, m.cut);
  if (!(hi > a)) return 0.0;
  const double c = m.amplitude;
  const double p = m.index;
  const double e = k - p;
  if (std::isinf(hi)) {
    if (e >= 0.0) {
      throw DivergentRequest("PowerTail: moment of order " + std::to_string(k) +
                             " diverges for index " + std::to_string(p));
    }
    return c * std::pow(a, e) / (-e);
  }
  if (e == 0.0) return c * std::log(hi / a);
  return c * (std::pow(hi, e) - std::pow(a, e)) / e;
}

inline double mass(const PowerTail& m) {
  return side_count(m.side) * m.amplitude * std::pow(m.cut, -m.index) / m.index;
}

inline double band(const PowerTail& m, double lo, double hi, int k, bool signed_) {
  const double f = side_factor(m.side, k, signed_);
  const double v = magnitude_band(m, lo, hi, k);
  return f == 0.0 ? 0.0 : f * v;
}

inline double scaled_tail(const PowerTail& m, double y, int k) {
  const double log_cut = std::log(m.cut);
  if (y < log_cut) return std::exp(k * y) * mass(m);
  return side_count(m.side) * (m.amplitude / m.index) * std::exp((k - m.index) * y);
}

inline double log_density(const PowerTail& m, double y, int k, bool signed_) {
  if (y < std::log(m.cut)) return 0.0;
  return side_factor(m.side, k, signed_) * m.amplitude * std::exp((k - m.index) * y);
}

inline MomentVerdict log_moment(const PowerTail& m) {
  // int_{|x|>=1} x^2 log|x| nu(dx) = c * int_lo^inf x^(1-p) log x dx, lo = max(1, cut)
  const double lo = std::max(1.0, m.cut);
  const double q = m.index - 2.0;
  const double v = std::pow(lo, -q) * (q * std::log(lo) + 1.0) / (q * q);
  return {MomentVerdict::Status::finite, side_count(m.side) * m.amplitude * v};
}

inline std::vector<double> breakpoints(const PowerTail& m) { return {m.cut}; }

inline void validate(const PowerTail& m) {
  if (!(std::isfinite(m.amplitude) && m.amplitude > 0.0)) {
    throw InvalidMeasure("PowerTail: amplitude must be positive");
  }
  if (!(std::isfinite(m.cut) && m.cut > 0.0)) {
    throw InvalidMeasure("PowerTail: support cut must be positive");
  }
  if (!std::isfinite(m.index)) throw InvalidMeasure("PowerTail: index must be finite");
  if (!(m.index > 2.0)) {
    throw InfiniteVariance("PowerTail: index must exceed 2 for a finite second moment");
  }
}

template <class URBG>
double sample_outside(const PowerTail& m, double a, URBG& g) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::max(a, m.cut);
  const double r = lo * std::pow(1.0 - unit(g), -1.0 / m.index);
  switch (m.side) {
    case Side::positive:
      return r;
    case Side::negative:
      return -r;
    case Side::symmetric:
      return unit(g) < 0.5 ? r : -r;
  }
  return r;
}

// ---- LogPerturbedPowerTail -----------------------------------------------
// In y = log|x| the magnitude measure is c * exp(-2y) * y^-gamma dy on y >= 1.

inline quad::Options semi_analytic_options() {
  quad::Options o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-300;
  return o;
}

// int_0^inf exp(-rate s) (y + s)^-gamma ds, written relative to y^-gamma.
inline double shifted_decay_integral(double y, double gamma, double rate, double length) {
  auto f = [=](double s) { return std::exp(-rate * s) * std::pow(1.0 + s / y, -gamma); };
  return std::pow(y, -gamma) * quad::integrate_value(f, 0.0, length, semi_analytic_options(), 1e-10);
}

inline double magnitude_band(const LogPerturbedPowerTail& m, double lo, double hi, int k) {
  const double y_lo = lo > 0.0 ? std::max(std::log(lo), 1.0) : 1.0;
  const double y_hi = std::isinf(hi) ? infinity : std::log(hi);
  if (!(y_hi > y_lo)) return 0.0;
  const double c = m.amplitude;
  const double g = m.gamma;
  switch (k) {
    case 2: {
      const double upper = std::isinf(y_hi) ? 0.0 : std::pow(y_hi, 1.0 - g);
      return c * (std::pow(y_lo, 1.0 - g) - upper) / (g - 1.0);
    }
    case 3: {
      if (std::isinf(y_hi)) {
        throw DivergentRequest("LogPerturbedPowerTail: third moment of the tail diverges");
      }
      auto f = [=](double y) { return std::exp(y - y_hi) * std::pow(y, -g); };
      return c * std::exp(y_hi) *
             quad::integrate_value(f, y_lo, y_hi, semi_analytic_options(), 1e-10);
    }
    default: {
      const double rate = 2.0 - k;
      return c * std::exp(-rate * y_lo) * shifted_decay_integral(y_lo, g, rate, y_hi - y_lo);
    }
  }
}

inline double mass(const LogPerturbedPowerTail& m) {
  return side_count(m.side) * m.mass_per_side;
}

inline double band(const LogPerturbedPowerTail& m, double lo, double hi, int k, bool signed_) {
  const double f = side_factor(m.side, k, signed_);
  if (f == 0.0) return 0.0;
  if (k == 0 && lo <= std::numbers::e && std::isinf(hi)) return f * m.mass_per_side;
  return f * magnitude_band(m, lo, hi, k);
}

inline double scaled_tail(const LogPerturbedPowerTail& m, double y, int k) {
  if (y <= 1.0) return std::exp(k * y) * mass(m);
  return side_count(m.side) * m.amplitude * std::exp((k - 2.0) * y) *
         shifted_decay_integral(y, m.gamma, 2.0, infinity);
}

inline double log_density(const LogPerturbedPowerTail& m, double y, int k, bool signed_) {
  if (y < 1.0) return 0.0;
  return side_factor(m.side, k, signed_) * m.amplitude * std::exp((k - 2.0) * y) *
         std::pow(y, -m.gamma);
}

inline MomentVerdict log_moment(const LogPerturbedPowerTail& m) {
  // c * int_1^inf y^(1-gamma) dy
  if (m.gamma > 2.0) {
    return {MomentVerdict::Status::finite,
            side_count(m.side) * m.amplitude / (m.gamma - 2.0)};
  }
  return {MomentVerdict::Status::infinite, std::nullopt};
}

inline std::vector<double> breakpoints(const LogPerturbedPowerTail&) {
  return {std::numbers::e};
}

inline void validate(LogPerturbedPowerTail& m) {
  if (!(std::isfinite(m.amplitude) && m.amplitude > 0.0)) {
    throw InvalidMeasure("LogPerturbedPowerTail: amplitude must be positive");
  }
  if (!std::isfinite(m.gamma)) throw InvalidMeasure("LogPerturbedPowerTail: gamma must be finite");
  if (!(m.gamma > 1.0)) {
    throw InfiniteVariance(
        "LogPerturbedPowerTail: gamma must exceed 1 for a finite second moment");
  }
  m.mass_per_side = magnitude_band(m, 0.0, infinity, 0);
}

/// Rejection from a Pareto(2) envelope on [max(a, e), inf); the acceptance
/// ratio (log lo / log r)^gamma is at most one.
template <class URBG>
double sample_outside(const LogPerturbedPowerTail& m, double a, URBG& g) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::max(a, std::numbers::e);
  const double log_lo = std::log(lo);
  double r = lo;
  for (;;) {
    r = lo / std::sqrt(1.0 - unit(g));
    if (unit(g) < std::pow(log_lo / std::log(r), m.gamma)) break;
  }
  switch (m.side) {
    case Side::positive:
      return r;
    case Side::negative:
      return -r;
    case Side::symmetric:
      return unit(g) < 0.5 ? r : -r;
  }
  return r;
}

// ---- GaussianJumps ---------------------------------------------------------

inline double standard_tail_term(double x, int j) {
  if (std::isinf(x)) return 0.0;
  return std::pow(x, j) * normal_pdf(x);
}

// E[X^k ; lo <= X < hi] for X ~ Normal(m, s^2), k <= 3.
inline double normal_partial_moment(double m, double s, double lo, double hi, int k) {
  if (!(hi > lo)) return 0.0;
  const double a = (lo - m) / s;
  const double b = (hi - m) / s;
  std::array<double, 4> z{};
  z[0] = normal_interval(a, b);
  z[1] = standard_tail_term(a, 0) - standard_tail_term(b, 0);
  z[2] = z[0] + standard_tail_term(a, 1) - standard_tail_term(b, 1);
  z[3] = 2.0 * z[1] + standard_tail_term(a, 2) - standard_tail_term(b, 2);
  constexpr std::array<std::array<double, 4>, 4> binom = {
      {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}}};
  double sum = 0.0;
  for (int j = 0; j <= k; ++j) {
    sum += binom[k][j] * std::pow(m, k - j) * std::pow(s, j) * z[j];
  }
  return sum;
}

inline double mass(const GaussianJumps& m) { return m.rate; }

inline double band(const GaussianJumps& m, double lo, double hi, int k, bool signed_) {
  const double pos = normal_partial_moment(m.mean, m.sd, lo, hi, k);
  // x <= -lo side, in terms of y = -x ~ Normal(-mean, sd^2)
  const double neg = normal_partial_moment(-m.mean, m.sd, lo, hi, k);
  const double neg_sign = (signed_ && (k % 2 == 1)) ? -1.0 : 1.0;
  return m.rate * (pos + neg_sign * neg);
}

inline double scaled_tail(const GaussianJumps& m, double y, int k) {
  const double r = std::exp(y);
  const double tail = normal_sf((r - m.mean) / m.sd) + normal_cdf((-r - m.mean) / m.sd);
  if (tail == 0.0) return 0.0;
  return std::exp(k * y) * m.rate * tail;
}

inline double log_density(const GaussianJumps& m, double y, int k, bool signed_) {
  const double r = std::exp(y);
  const double zp = (r - m.mean) / m.sd;
  const double zn = (-r - m.mean) / m.sd;
  const double norm = m.rate / (m.sd * std::sqrt(2.0 * std::numbers::pi));
  const double neg_sign = (signed_ && (k % 2 == 1)) ? -1.0 : 1.0;
  return norm * (std::exp((k + 1) * y - 0.5 * zp * zp) +
                 neg_sign * std::exp((k + 1) * y - 0.5 * zn * zn));
}

inline MomentVerdict log_moment(const GaussianJumps&) {
  // Gaussian jumps have every moment; the value has no closed form.
  return {MomentVerdict::Status::finite, std::nullopt};
}

inline std::vector<double> breakpoints(const GaussianJumps&) { return {}; }

inline void validate(const GaussianJumps& m) {
  if (!(std::isfinite(m.rate) && m.rate > 0.0)) {
    throw InvalidMeasure("CompoundPoissonParametric: rate must be positive");
  }
  if (!std::isfinite(m.mean)) throw InvalidMeasure("CompoundPoissonParametric: mean must be finite");
  if (!(std::isfinite(m.sd) && m.sd > 0.0)) {
    throw InvalidMeasure("CompoundPoissonParametric: jump sd must be positive");
  }
}

template <class URBG>
double sample_outside(const GaussianJumps& m, double a, URBG& g) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (a <= 0.0) return m.mean + m.sd * normal(g);
  const double upper = normal_sf((a - m.mean) / m.sd);
  const double lower = normal_cdf((-a - m.mean) / m.sd);
  if (upper + lower > 0.25) {
    for (;;) {
      const double x = m.mean + m.sd * normal(g);
      if (std::fabs(x) >= a) return x;
    }
  }
  if (upper + lower == 0.0) {
    throw UnsupportedMeasure("CompoundPoissonParametric: conditional tail underflows");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool pick_upper = unit(g) * (upper + lower) < upper;
  const double q = 1.0 - unit(g);
  if (pick_upper) return m.mean + m.sd * normal_isf(q * upper);
  return m.mean - m.sd * normal_isf(q * lower);
}

}  // namespace detail

/// Declarative Levy measure: a family tag plus its compound Poisson components.
class MeasureSpec {
 public:
  MeasureSpec() = default;

  static MeasureSpec zero() { return MeasureSpec(Family::zero, {}); }
  static MeasureSpec compound_poisson(GaussianJumps law) {
    return MeasureSpec(Family::compound_poisson_parametric, {law});
  }
  static MeasureSpec power_tail(PowerTail law) { return MeasureSpec(Family::power_tail, {law}); }
  static MeasureSpec log_perturbed_power_tail(LogPerturbedPowerTail law) {
    return MeasureSpec(Family::log_perturbed_power_tail, {law});
  }
  static MeasureSpec mixture(std::vector<Component> parts) {
    if (parts.empty()) throw InvalidMeasure("TwoSidedMixture: needs at least one component");
    return MeasureSpec(Family::two_sided_mixture, std::move(parts));
  }

  Family family() const { return family_; }
  std::span<const Component> components() const { return components_; }
  bool trivial() const { return components_.empty(); }

  double total_mass() const {
    double sum = 0.0;
    for (const auto& c : components_) sum += std::visit([](const auto& m) { return detail::mass(m); }, c);
    return sum;
  }

  /// int_{lo <= |x| < hi} x^k nu(dx) (signed) or |x|^k nu(dx); hi may be infinite.
  double band_moment(double lo, double hi, int k, bool signed_ = false) const {
    if (k < 0 || k > 3) throw DomainError("moment order must be in {0, 1, 2, 3}");
    if (!(lo >= 0.0) || !(hi >= lo)) throw DomainError("band must satisfy 0 <= lo <= hi");
    double sum = 0.0;
    for (const auto& c : components_) {
      sum += std::visit([&](const auto& m) { return detail::band(m, lo, hi, k, signed_); }, c);
    }
    return sum;
  }

  /// nu(R \ (-w, w)).
  double tail_mass(double w) const { return band_moment(std::max(w, 0.0), infinity, 0); }

  double second_moment() const { return band_moment(0.0, infinity, 2); }

  /// exp(k y) * tail_mass(exp(y)), evaluated without overflow for large y.
  double scaled_tail(double y, int k) const {
    double sum = 0.0;
    for (const auto& c : components_) {
      sum += std::visit([&](const auto& m) { return detail::scaled_tail(m, y, k); }, c);
    }
    return sum;
  }

  /// Integrand of band_moment in the variable y = log|x|: |x|^(k+1) times the
  /// density at +-exp(y), summed over sides (negative side signed if asked).
  double log_density(double y, int k, bool signed_ = false) const {
    double sum = 0.0;
    for (const auto& c : components_) {
      sum += std::visit([&](const auto& m) { return detail::log_density(m, y, k, signed_); }, c);
    }
    return sum;
  }

  /// Magnitudes where the density is not smooth.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (const auto& c : components_) {
      auto b = std::visit([](const auto& m) { return detail::breakpoints(m); }, c);
      out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Finiteness of int_{|x|>=1} x^2 log|x| nu(dx).
  MomentVerdict log_moment() const {
    if (components_.empty()) return {MomentVerdict::Status::finite, 0.0};
    bool unknown = false;
    bool has_value = true;
    double value = 0.0;
    for (const auto& c : components_) {
      const auto v = std::visit([](const auto& m) { return detail::log_moment(m); }, c);
      if (v.status == MomentVerdict::Status::infinite) return v;
      if (v.status == MomentVerdict::Status::unknown) unknown = true;
      if (v.value) {
        value += *v.value;
      } else {
        has_value = false;
      }
    }
    if (unknown) return {MomentVerdict::Status::unknown, std::nullopt};
    if (!has_value) return {MomentVerdict::Status::finite, std::nullopt};
    return {MomentVerdict::Status::finite, value};
  }

 private:
  MeasureSpec(Family family, std::vector<Component> parts)
      : family_(family), components_(std::move(parts)) {
    for (auto& c : components_) {
      std::visit([](auto& m) { detail::validate(m); }, c);
    }
  }

  Family family_ = Family::zero;
  std::vector<Component> components_;
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::zero:
      return "Zero";
    case Family::compound_poisson_parametric:
      return "CompoundPoissonParametric";
    case Family::power_tail:
      return "PowerTail";
    case Family::log_perturbed_power_tail:
      return "LogPerturbedPowerTail";
    case Family::two_sided_mixture:
      return "TwoSidedMixture";
  }
  return "?";
}

inline const char* verdict_name(MomentVerdict::Status s) {
  switch (s) {
    case MomentVerdict::Status::finite:
      return "Finite";
    case MomentVerdict::Status::infinite:
      return "Infinite";
    case MomentVerdict::Status::unknown:
      return "Unknown";
  }
  return "?";
}

}  // namespace levyclt
