#pragma once

// Endpoint Monte Carlo for X_t and for the split X_t = Y_t^(t) + Ytilde_t^(t)
// at jump magnitude kappa sqrt(t).
//
// Every supported measure is finite-activity, so simulation is exact: Brownian
// part, compensating drift, Poisson number of jumps with i.i.d. sizes. With
// small_jump_eps > 0 the jumps of magnitude below eps are replaced, together
// with the Brownian part, by one Gaussian with the same mean and variance;
// substitution_bound() bounds the Kolmogorov distance this costs.
//
// Chunk i of a plan draws from its own mt19937_64 seeded with (seed, i), so
// output is bit-identical for any number of worker threads.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <thread>
#include <variant>
#include <vector>

#include "levyclt/errors.hpp"
#include "levyclt/levy_model.hpp"
#include "levyclt/measure.hpp"

namespace levyclt {

struct SimPlan {
  double t = 1.0;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  std::size_t chunk = std::size_t{1} << 14;
  double small_jump_eps = 0.0;  // 0 simulates every jump
  unsigned threads = 0;         // 0 uses hardware concurrency
};

struct DecomposedDraw {
  double y = 0.0;        // Y_t^(t): everything but jumps of magnitude >= kappa sqrt t
  double y_tilde = 0.0;  // sum of jumps of magnitude >= kappa sqrt t
  bool no_big_jump = true;
};

/// Which sampling routine a substitution threshold is meant for. Endpoint
/// draws sum Gaussian jumps exactly in one step, so those components never
/// need substitution there.
enum class SamplingMode { endpoint, decomposed };

struct SubstitutionPolicy {
  double tolerance = 1e-3;
  double exact_jump_budget = 256.0;  // expected jumps per draw simulated without substitution
  double berry_esseen_constant = 0.4748;
};

namespace detail {

inline bool exact_batch(const Component& c, SamplingMode mode) {
  return mode == SamplingMode::endpoint && std::holds_alternative<GaussianJumps>(c);
}

inline double component_band(const Component& c, double lo, double hi, int k, bool signed_) {
  return std::visit([&](const auto& m) { return detail::band(m, lo, hi, k, signed_); }, c);
}

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                    0x4c657679u};
  return std::mt19937_64(seq);
}

inline unsigned resolve_threads(unsigned requested, std::size_t chunks) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(chunks, 1)));
}

// Runs body(engine, begin, end) for every chunk; chunks are dealt round-robin.
template <class Body>
void for_each_chunk(const SimPlan& plan, Body&& body) {
  const std::size_t chunks = (plan.n + plan.chunk - 1) / plan.chunk;
  const unsigned workers = resolve_threads(plan.threads, chunks);
  auto run = [&](unsigned w) {
    for (std::size_t c = w; c < chunks; c += workers) {
      auto engine = chunk_engine(plan.seed, c);
      const std::size_t begin = c * plan.chunk;
      const std::size_t end = std::min(plan.n, begin + plan.chunk);
      body(engine, begin, end);
    }
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
}

struct JumpSource {
  const Component* law;
  double rate;  // expected number of jumps per draw
  bool batch;
};

struct Kernel {
  double shift = 0.0;  // compensating drift plus mean of the substituted part
  double gauss_sd = 0.0;
  double big_cut = 0.0;
  double eps = 0.0;
  std::vector<JumpSource> sources;
};

inline void validate_plan(const LevyModel& model, const SimPlan& plan) {
  if (!(plan.t >= 1.0) || !std::isfinite(plan.t)) throw InvalidPlan("plan: t must be >= 1");
  if (plan.n < 1) throw InvalidPlan("plan: n must be >= 1");
  if (plan.chunk < 1) throw InvalidPlan("plan: chunk must be >= 1");
  const double cut = model.kappa() * std::sqrt(plan.t);
  if (!(plan.small_jump_eps >= 0.0 && plan.small_jump_eps < cut)) {
    throw InvalidPlan("plan: small_jump_eps must lie in [0, kappa sqrt t)");
  }
}

inline Kernel make_kernel(const LevyModel& model, const SimPlan& plan, SamplingMode mode) {
  validate_plan(model, plan);
  const double t = plan.t;
  const double eps = plan.small_jump_eps;
  Kernel k;
  k.big_cut = model.kappa() * std::sqrt(t);
  k.eps = eps;
  // X_t = Sigma W_t + sum of jumps - t int x nu(dx)
  k.shift = -t * model.measure().band_moment(0.0, infinity, 1, true);
  double var = model.gaussian_var() * t;
  for (const auto& c : model.measure().components()) {
    const bool batch = exact_batch(c, mode);
    if (!batch && eps > 0.0) {
      k.shift += t * component_band(c, 0.0, eps, 1, true);
      var += t * component_band(c, 0.0, eps, 2, false);
    }
    const double rate = t * (batch ? component_band(c, 0.0, infinity, 0, false)
                                   : component_band(c, eps, infinity, 0, false));
    if (rate > 0.0) k.sources.push_back({&c, rate, batch});
  }
  k.gauss_sd = std::sqrt(var);
  return k;
}

}  // namespace detail

/// Kolmogorov-distance price of substituting jumps below eps, the smaller of
/// two certificates. With M2, M3 the second and third absolute moments of nu
/// on |x| < eps:
///  * Berry-Esseen for the replaced infinitely divisible part (the i.i.d.
///    inequality passed to the limit), which convolution cannot increase:
///      c M3 / (sqrt(t) (Sigma^2 + M2)^{3/2});
///  * a Lindeberg interpolation between the small jumps and their Gaussian
///    replacement, smoothed by the Brownian part and the partially
///    interpolated Gaussian, with sup |phi_v''| = 1 / (sqrt(2 pi) v^{3/2}):
///      t M3 / 6 * int_0^t phi''_sup(Sigma^2 t + M2 r) dr
///      = M3 / (3 sqrt(2 pi) M2 sqrt(t)) * (1 / Sigma - 1 / sqrt(Sigma^2 + M2)).
inline double substitution_bound(const LevyModel& model, double t, double eps, SamplingMode mode,
                                 double berry_esseen_constant = 0.4748) {
  if (eps <= 0.0) return 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  for (const auto& c : model.measure().components()) {
    if (detail::exact_batch(c, mode)) continue;
    m2 += detail::component_band(c, 0.0, eps, 2, false);
    m3 += detail::component_band(c, 0.0, eps, 3, false);
  }
  if (m3 == 0.0) return 0.0;
  const double g = model.gaussian_var();
  const double root_t = std::sqrt(t);
  const double berry_esseen = berry_esseen_constant * m3 / (root_t * std::pow(g + m2, 1.5));
  if (g <= 0.0) return berry_esseen;
  const double root_g = std::sqrt(g);
  const double root_total = std::sqrt(g + m2);
  // 1/Sigma - 1/sqrt(Sigma^2 + M2) = M2 / (Sigma sqrt(Sigma^2 + M2) (Sigma + sqrt(Sigma^2 + M2)))
  const double spread = 1.0 / (root_g * root_total * (root_g + root_total));
  const double lindeberg = m3 * spread / (3.0 * std::sqrt(2.0 * std::numbers::pi) * root_t);
  return std::min(berry_esseen, lindeberg);
}

/// Largest threshold on the grid kappa sqrt(t) 2^(-j/8) whose substitution
/// bound is within tolerance; 0 (exact simulation) when the expected jump
/// count is within budget or no threshold qualifies.
inline double choose_small_jump_eps(const LevyModel& model, double t, SamplingMode mode,
                                    const SubstitutionPolicy& policy = {}) {
  double exact_rate = 0.0;
  for (const auto& c : model.measure().components()) {
    if (!detail::exact_batch(c, mode)) {
      exact_rate += t * detail::component_band(c, 0.0, infinity, 0, false);
    }
  }
  if (exact_rate <= policy.exact_jump_budget) return 0.0;
  const double cut = model.kappa() * std::sqrt(t);
  for (int j = 1; j <= 480; ++j) {
    const double eps = cut * std::exp2(-j / 8.0);
    if (substitution_bound(model, t, eps, mode, policy.berry_esseen_constant) <=
        policy.tolerance) {
      return eps;
    }
  }
  return 0.0;
}

/// n i.i.d. draws of X_t.
inline std::vector<double> sample_endpoint(const LevyModel& model, const SimPlan& plan) {
  const auto kernel = detail::make_kernel(model, plan, SamplingMode::endpoint);
  std::vector<double> out(plan.n);
  detail::for_each_chunk(plan, [&](std::mt19937_64& g, std::size_t begin, std::size_t end) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::poisson_distribution<std::int64_t>> counts;
    for (const auto& s : kernel.sources) counts.emplace_back(s.rate);
    for (std::size_t i = begin; i < end; ++i) {
      double x = kernel.shift + kernel.gauss_sd * normal(g);
      for (std::size_t s = 0; s < kernel.sources.size(); ++s) {
        const auto& src = kernel.sources[s];
        const auto jumps = counts[s](g);
        if (jumps == 0) continue;
        if (src.batch) {
          const auto& law = std::get<GaussianJumps>(*src.law);
          const double nj = static_cast<double>(jumps);
          x += nj * law.mean + std::sqrt(nj) * law.sd * normal(g);
          continue;
        }
        std::visit(
            [&](const auto& law) {
              for (std::int64_t j = 0; j < jumps; ++j) x += detail::sample_outside(law, kernel.eps, g);
            },
            *src.law);
      }
      out[i] = x;
    }
  });
  return out;
}

/// n i.i.d. draws of (Y_t^(t), Ytilde_t^(t), 1{J_t}) from one path decomposition.
inline std::vector<DecomposedDraw> sample_decomposed(const LevyModel& model, const SimPlan& plan) {
  const auto kernel = detail::make_kernel(model, plan, SamplingMode::decomposed);
  std::vector<DecomposedDraw> out(plan.n);
  detail::for_each_chunk(plan, [&](std::mt19937_64& g, std::size_t begin, std::size_t end) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::poisson_distribution<std::int64_t>> counts;
    for (const auto& s : kernel.sources) counts.emplace_back(s.rate);
    for (std::size_t i = begin; i < end; ++i) {
      DecomposedDraw d;
      d.y = kernel.shift + kernel.gauss_sd * normal(g);
      for (std::size_t s = 0; s < kernel.sources.size(); ++s) {
        const auto jumps = counts[s](g);
        std::visit(
            [&](const auto& law) {
              for (std::int64_t j = 0; j < jumps; ++j) {
                const double jump = detail::sample_outside(law, kernel.eps, g);
                assert(std::fabs(jump) >= kernel.eps);
                if (std::fabs(jump) >= kernel.big_cut) {
                  d.y_tilde += jump;
                  d.no_big_jump = false;
                } else {
                  d.y += jump;
                }
              }
            },
            *kernel.sources[s].law);
      }
      out[i] = d;
    }
  });
  return out;
}

}  // namespace levyclt
