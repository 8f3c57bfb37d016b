#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "levyclt/errors.hpp"
#include "levyclt/measure.hpp"

namespace levyclt {

/// Mean-zero, finite-variance Levy process given by its generating triplet
/// relative to the cutoff 1{|x| < 1}. The drift is always the compensating
/// one, so E[X_1] = 0 cannot be violated.
class LevyModel {
 public:
  double gaussian_var() const { return gaussian_var_; }
  const MeasureSpec& measure() const { return measure_; }
  double drift() const { return drift_; }
  double kappa() const { return kappa_; }

  /// sigma^2 = Sigma^2 + int x^2 nu(dx).
  double total_variance() const { return total_variance_; }

  /// sigma_1^2 = Sigma^2 + int_{(-kappa, kappa)} x^2 nu(dx).
  double sigma1_sq() const { return sigma1_sq_; }
  double sigma1() const { return std::sqrt(sigma1_sq_); }

 private:
  friend LevyModel build_model(double, MeasureSpec);
  friend LevyModel build_model(double, MeasureSpec, double);

  LevyModel(double gaussian_var, MeasureSpec measure, double kappa)
      : gaussian_var_(gaussian_var), measure_(std::move(measure)), kappa_(kappa) {
    drift_ = -measure_.band_moment(1.0, infinity, 1, true);
    total_variance_ = gaussian_var_ + measure_.second_moment();
    sigma1_sq_ = gaussian_var_ + measure_.band_moment(0.0, kappa_, 2);
  }

  double gaussian_var_ = 0.0;
  MeasureSpec measure_;
  double drift_ = 0.0;
  double kappa_ = 1.0;
  double total_variance_ = 0.0;
  double sigma1_sq_ = 0.0;
};

namespace detail {

inline void check_gaussian_part(double gaussian_var, const MeasureSpec& measure) {
  if (!(std::isfinite(gaussian_var) && gaussian_var >= 0.0)) {
    throw ModelError("gaussian_var must be finite and nonnegative");
  }
  const double second = measure.second_moment();
  if (!std::isfinite(second)) throw InfiniteVariance("second moment of the Levy measure diverges");
  if (!(gaussian_var + second > 0.0)) throw DegenerateModel();
}

}  // namespace detail

/// Builds the model, choosing kappa as the smallest power of two with
/// Sigma^2 + int_{(-kappa, kappa)} x^2 nu(dx) > 0 (kappa = 1 when nu = 0).
inline LevyModel build_model(double gaussian_var, MeasureSpec measure) {
  detail::check_gaussian_part(gaussian_var, measure);
  double kappa = 1.0;
  if (!measure.trivial()) {
    for (int i = 0; i < 1024; ++i, kappa *= 2.0) {
      if (gaussian_var + measure.band_moment(0.0, kappa, 2) > 0.0) break;
    }
  }
  return LevyModel(gaussian_var, std::move(measure), kappa);
}

/// Builds the model with an explicit truncation unit. kappa must be >= 1 and
/// keep sigma_1 > 0.
inline LevyModel build_model(double gaussian_var, MeasureSpec measure, double kappa) {
  detail::check_gaussian_part(gaussian_var, measure);
  if (!(std::isfinite(kappa) && kappa >= 1.0)) throw ModelError("kappa must be >= 1");
  if (measure.trivial() && kappa != 1.0) throw ModelError("kappa must be 1 when nu = 0");
  if (!(gaussian_var + measure.band_moment(0.0, kappa, 2) > 0.0)) {
    throw DegenerateModel("degenerate model: sigma_1 = 0 for the requested kappa");
  }
  return LevyModel(gaussian_var, std::move(measure), kappa);
}

inline double total_variance(const LevyModel& model) { return model.total_variance(); }

namespace detail {
inline void require_time(double t) {
  if (!(t >= 1.0) || !std::isfinite(t)) throw DomainError("time must satisfy t >= 1");
}
}  // namespace detail

/// sigma_t = sqrt(sigma^2 - int_{|x| >= kappa sqrt t} x^2 nu(dx)).
inline double sigma_t(const LevyModel& model, double t) {
  detail::require_time(t);
  const double cut = model.kappa() * std::sqrt(t);
  const double tail = model.measure().band_moment(cut, infinity, 2);
  // Both forms are exact; pick the one without cancellation.
  const double var = tail < 0.5 * model.total_variance()
                         ? model.total_variance() - tail
                         : model.gaussian_var() + model.measure().band_moment(0.0, cut, 2);
  return std::sqrt(var);
}

/// mu_t = E[Y_t^(t)] = -t int_{|x| >= kappa sqrt t} x nu(dx).
inline double mu_t(const LevyModel& model, double t) {
  detail::require_time(t);
  const double cut = model.kappa() * std::sqrt(t);
  return -t * model.measure().band_moment(cut, infinity, 1, true);
}

/// Classifies int_{|x|>=1} x^2 log|x| nu(dx) analytically; log(x) is read as
/// log|x| on |x| >= 1.
inline MomentVerdict log_moment_finite(const LevyModel& model) {
  return model.measure().log_moment();
}

}  // namespace levyclt
