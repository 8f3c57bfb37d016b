#pragma once

// t-grid scans of the Kolmogorov distance under both normalisations, the
// dt/t decay integrals, and the finite-horizon sigma-deficit identity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "levyclt/bounds.hpp"
#include "levyclt/distance.hpp"
#include "levyclt/errors.hpp"
#include "levyclt/integrate.hpp"
#include "levyclt/levy_model.hpp"
#include "levyclt/quadrature.hpp"
#include "levyclt/sampler.hpp"

namespace levyclt {

struct ScanGrid {
  double t_min = 1.0;
  double t_max = 1e6;
  std::size_t points = 50;
};

/// Log-spaced, strictly increasing times in [t_min, t_max].
inline std::vector<double> grid_times(const ScanGrid& grid) {
  if (!(grid.t_min >= 1.0) || !std::isfinite(grid.t_max)) throw DomainError("grid: t_min must be >= 1");
  if (grid.points == 0) throw DomainError("grid: needs at least one point");
  if (grid.points == 1) return {grid.t_min};
  if (!(grid.t_max > grid.t_min)) throw DomainError("grid: t_max must exceed t_min");
  std::vector<double> ts(grid.points);
  const double lo = std::log(grid.t_min);
  const double step = (std::log(grid.t_max) - lo) / static_cast<double>(grid.points - 1);
  for (std::size_t i = 0; i < grid.points; ++i) ts[i] = std::exp(lo + step * static_cast<double>(i));
  ts.front() = grid.t_min;
  ts.back() = grid.t_max;
  return ts;
}

struct SimConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double alpha = default_alpha;
  unsigned threads = 0;
  std::size_t chunk = std::size_t{1} << 14;
  SubstitutionPolicy substitution;
  BoundsConfig bounds;
};

struct ScanRow {
  double t = 1.0;
  double sigma_t = 0.0;
  DistanceEstimate ks_sigma_t;  // X_t / sqrt t against Normal(0, sigma_t^2)
  DistanceEstimate ks_sigma;    // X_t / sqrt t against Normal(0, sigma^2)
  BoundBreakdown bound;
  double small_jump_eps = 0.0;
  double substitution_bound = 0.0;
  double integral_sigma_t = 0.0;  // running int_{t_min}^t K dt/t
  double integral_sigma = 0.0;
  double integral_slack = 0.0;    // same trapezoid applied to the DKW slack
};

struct ScanReport {
  double sigma = 0.0;
  double kappa = 1.0;
  std::size_t samples = 0;
  double alpha = default_alpha;
  std::uint64_t seed = 0;
  std::vector<ScanRow> rows;
};

enum class Normalization { sigma_t, sigma };

struct DecayIntegral {
  double estimate = 0.0;
  double slack = 0.0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seed used for grid point i of a scan seeded with `seed`.
inline std::uint64_t grid_point_seed(std::uint64_t seed, std::size_t i) {
  return detail::splitmix64(seed ^ detail::splitmix64(static_cast<std::uint64_t>(i) + 1));
}

inline ScanReport scan(const LevyModel& model, const ScanGrid& grid, const SimConfig& cfg = {}) {
  if (cfg.samples < 1) throw InvalidPlan("scan: samples must be >= 1");
  const auto ts = grid_times(grid);
  ScanReport report;
  report.sigma = std::sqrt(model.total_variance());
  report.kappa = model.kappa();
  report.samples = cfg.samples;
  report.alpha = cfg.alpha;
  report.seed = cfg.seed;
  report.rows.reserve(ts.size());

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    SimPlan plan;
    plan.t = t;
    plan.n = cfg.samples;
    plan.seed = grid_point_seed(cfg.seed, i);
    plan.chunk = cfg.chunk;
    plan.threads = cfg.threads;
    plan.small_jump_eps = choose_small_jump_eps(model, t, SamplingMode::endpoint, cfg.substitution);

    auto draws = sample_endpoint(model, plan);
    const double root_t = std::sqrt(t);
    for (double& x : draws) x /= root_t;
    std::sort(draws.begin(), draws.end());

    ScanRow row;
    row.t = t;
    row.sigma_t = sigma_t(model, t);
    row.ks_sigma_t = ks_against_normal_sorted(draws, row.sigma_t, cfg.alpha);
    row.ks_sigma = ks_against_normal_sorted(draws, report.sigma, cfg.alpha);
    row.bound = total_bound(model, t, cfg.bounds);
    row.small_jump_eps = plan.small_jump_eps;
    row.substitution_bound = substitution_bound(model, t, plan.small_jump_eps, SamplingMode::endpoint,
                                                cfg.substitution.berry_esseen_constant);
    if (!report.rows.empty()) {
      const auto& prev = report.rows.back();
      const double du = std::log(t) - std::log(prev.t);
      row.integral_sigma_t = prev.integral_sigma_t + 0.5 * du * (prev.ks_sigma_t.value + row.ks_sigma_t.value);
      row.integral_sigma = prev.integral_sigma + 0.5 * du * (prev.ks_sigma.value + row.ks_sigma.value);
      row.integral_slack =
          prev.integral_slack + 0.5 * du * (prev.ks_sigma_t.dkw_slack + row.ks_sigma_t.dkw_slack);
    }
    report.rows.push_back(row);
  }
  return report;
}

/// Trapezoid in u = log t of the scanned distance over the whole grid.
inline DecayIntegral decay_integral(const ScanReport& report, Normalization which) {
  if (report.rows.empty()) throw DomainError("decay_integral: empty report");
  const auto& last = report.rows.back();
  return {which == Normalization::sigma_t ? last.integral_sigma_t : last.integral_sigma,
          last.integral_slack};
}

struct DeficitIntegral {
  double lhs = 0.0;  // int_1^T (sigma^2 - sigma_t^2) dt / t
  double rhs = 0.0;  // int_{|x|>=kappa} x^2 log(min(x^2, T kappa^2) / kappa^2) nu(dx)
};

/// Both sides of the finite-horizon Fubini identity, each by its own route:
/// the left through the tail second moment in u = log t, the right by direct
/// quadrature of the density in y = log|x|.
inline DeficitIntegral sigma_deficit_integral(const LevyModel& model, double horizon) {
  if (!(horizon >= 1.0)) throw DomainError("sigma_deficit_integral: T must be >= 1");
  const auto& m = model.measure();
  DeficitIntegral out;
  if (m.trivial() || horizon == 1.0) return out;
  const double kappa = model.kappa();
  const double log_t = std::log(horizon);
  quad::Options opts;
  opts.rel_tol = 1e-11;
  opts.max_intervals = 40000;

  std::vector<double> us{0.0};
  for (double b : m.breakpoints()) {
    const double u = 2.0 * std::log(b / kappa);
    if (u > 0.0 && u < log_t) us.push_back(u);
  }
  us.push_back(log_t);
  std::sort(us.begin(), us.end());
  out.lhs = quad::integrate_value(
      [&](double u) { return m.band_moment(kappa * std::exp(0.5 * u), infinity, 2); }, us, opts,
      1e-9);

  const double y0 = std::log(kappa);
  const double y1 = y0 + 0.5 * log_t;
  std::vector<double> ys{y0, y1};
  for (double b : m.breakpoints()) {
    const double y = std::log(b);
    if (y > y0 && y != y1) ys.push_back(y);
  }
  ys.push_back(infinity);
  std::sort(ys.begin(), ys.end());
  out.rhs = quad::integrate_value(
      [&](double y) { return m.log_density(y, 2) * std::min(2.0 * (y - y0), log_t); }, ys, opts,
      1e-9);
  return out;
}

enum class RegimePrediction { both_integrals_finite, only_sigma_t_finite, unknown };

struct RegimeClassification {
  MomentVerdict condition;
  RegimePrediction prediction = RegimePrediction::unknown;
};

/// The sigma_t-normalised integral is always finite; the sigma-normalised one
/// is finite exactly when the x^2 log|x| moment is.
inline RegimeClassification classify_regime(const LevyModel& model) {
  RegimeClassification out;
  out.condition = log_moment_finite(model);
  switch (out.condition.status) {
    case MomentVerdict::Status::finite:
      out.prediction = RegimePrediction::both_integrals_finite;
      break;
    case MomentVerdict::Status::infinite:
      out.prediction = RegimePrediction::only_sigma_t_finite;
      break;
    case MomentVerdict::Status::unknown:
      out.prediction = RegimePrediction::unknown;
      break;
  }
  return out;
}

inline const char* prediction_name(RegimePrediction p) {
  switch (p) {
    case RegimePrediction::both_integrals_finite:
      return "BothIntegralsFinite";
    case RegimePrediction::only_sigma_t_finite:
      return "OnlySigmaTFinite";
    case RegimePrediction::unknown:
      return "Unknown";
  }
  return "?";
}

}  // namespace levyclt
