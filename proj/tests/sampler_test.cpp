#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/distributions/poisson.hpp>
#include <gtest/gtest.h>

#include "levyclt/distance.hpp"
#include "levyclt/sampler.hpp"

namespace {

using namespace levyclt;

LevyModel power_tail_model() {
  return build_model(1.0, MeasureSpec::power_tail({3.0, 3.0, 1.0, Side::positive}));
}

// Exact law of X_t = Sigma W_t + sum_{i<=N} xi_i - t rate mean, N ~ Poisson(rate t).
double compound_gaussian_cdf(double x, double gvar, const GaussianJumps& j, double t) {
  const boost::math::poisson_distribution<double> count(j.rate * t);
  const double shift = -t * j.rate * j.mean;
  double sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double w = boost::math::pdf(count, k);
    if (k > j.rate * t && w < 1e-18) break;
    sum += w * normal_cdf((x - shift - k * j.mean) / std::sqrt(gvar * t + k * j.sd * j.sd));
  }
  return sum;
}

double ks_against(std::vector<double> xs, auto cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    sup = std::max({sup, (i + 1) / n - f, f - i / n});
  }
  return sup;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    sup = std::max(sup, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return sup;
}

TEST(Sampler, DeterministicAcrossThreadCounts) {
  const auto m = power_tail_model();
  SimPlan plan{30.0, 5000, 99, 700, 0.0, 1};
  const auto one = sample_endpoint(m, plan);
  plan.threads = 4;
  const auto many = sample_endpoint(m, plan);
  EXPECT_EQ(one, many);
  plan.seed = 100;
  EXPECT_NE(sample_endpoint(m, plan), one);

  SimPlan dplan{30.0, 3000, 5, 512, 0.0, 1};
  const auto d1 = sample_decomposed(m, dplan);
  dplan.threads = 3;
  const auto d3 = sample_decomposed(m, dplan);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    ASSERT_EQ(d1[i].y, d3[i].y);
    ASSERT_EQ(d1[i].y_tilde, d3[i].y_tilde);
  }
}

TEST(Sampler, PlanValidation) {
  const auto m = power_tail_model();
  EXPECT_THROW(sample_endpoint(m, {0.5, 10, 1}), InvalidPlan);
  EXPECT_THROW(sample_endpoint(m, {2.0, 0, 1}), InvalidPlan);
  SimPlan bad{4.0, 10, 1};
  bad.small_jump_eps = 2.0;  // equals kappa sqrt t
  EXPECT_THROW(sample_endpoint(m, bad), InvalidPlan);
  bad.small_jump_eps = -1.0;
  EXPECT_THROW(sample_endpoint(m, bad), InvalidPlan);
}

TEST(Sampler, CompoundGaussianMatchesExactLaw) {
  const GaussianJumps j{1.0, 0.5, 1.0};
  const auto m = build_model(0.5, MeasureSpec::compound_poisson(j));
  for (double t : {1.0, 7.0}) {
    SimPlan plan{t, 40000, 17};
    const auto xs = sample_endpoint(m, plan);
    const double d = ks_against(xs, [&](double x) { return compound_gaussian_cdf(x, 0.5, j, t); });
    EXPECT_LE(d, dkw_slack(xs.size(), 1e-3)) << t;
    const auto ds = sample_decomposed(m, plan);
    std::vector<double> sums(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) sums[i] = ds[i].y + ds[i].y_tilde;
    const double e = ks_against(sums, [&](double x) { return compound_gaussian_cdf(x, 0.5, j, t); });
    EXPECT_LE(e, dkw_slack(sums.size(), 1e-3)) << t;
  }
}

TEST(Sampler, MomentsOfPowerTail) {
  const auto m = power_tail_model();
  SimPlan plan{9.0, 100000, 3};
  const auto xs = sample_endpoint(m, plan);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  // Var X_t = 4 t = 36, so the mean has standard error 0.019.
  EXPECT_NEAR(mean, 0.0, 4.0 * 6.0 / std::sqrt(1e5));
}

TEST(Sampler, NoBigJumpFrequency) {
  const auto m = power_tail_model();
  for (double t : {4.0, 25.0, 100.0}) {
    SimPlan plan{t, 100000, 41};
    const auto ds = sample_decomposed(m, plan);
    std::size_t clean = 0;
    for (const auto& d : ds) {
      clean += d.no_big_jump;
      if (d.no_big_jump) {
        ASSERT_EQ(d.y_tilde, 0.0);
      }
    }
    const double p = std::exp(-t * m.measure().tail_mass(std::sqrt(t)));
    const double se = std::sqrt(p * (1.0 - p) / ds.size());
    EXPECT_NEAR(clean / double(ds.size()), p, 4.0 * se) << t;
  }
}

TEST(Sampler, DecomposedSumMatchesEndpointLaw) {
  const auto m = build_model(1.0, MeasureSpec::mixture({PowerTail{3.0, 3.0, 1.0, Side::positive},
                                                        LogPerturbedPowerTail{1.5, 1.0, Side::negative},
                                                        GaussianJumps{1.0, 0.3, 0.5}}));
  SimPlan plan{16.0, 20000, 1};
  const auto xs = sample_endpoint(m, plan);
  plan.seed = 2;
  const auto ds = sample_decomposed(m, plan);
  std::vector<double> sums;
  for (const auto& d : ds) sums.push_back(d.y + d.y_tilde);
  const double n = xs.size();
  EXPECT_LE(two_sample_ks(xs, sums), 1.6276 * std::sqrt(2.0 / n));
}

TEST(Substitution, ExactWhenWithinBudget) {
  const auto m = power_tail_model();
  EXPECT_EQ(choose_small_jump_eps(m, 100.0, SamplingMode::endpoint), 0.0);
  EXPECT_EQ(substitution_bound(m, 100.0, 0.0, SamplingMode::endpoint), 0.0);
}

TEST(Substitution, ChosenThresholdMeetsTolerance) {
  const auto m = power_tail_model();
  for (double t : {1e3, 1e4, 1e6}) {
    SubstitutionPolicy pol;
    const double eps = choose_small_jump_eps(m, t, SamplingMode::endpoint, pol);
    ASSERT_GT(eps, 0.0);
    EXPECT_LT(eps, std::sqrt(t));
    EXPECT_LE(substitution_bound(m, t, eps, SamplingMode::endpoint), pol.tolerance);
    const double next = eps * std::exp2(1.0 / 8.0);
    if (next < std::sqrt(t) * (1.0 - 1e-12)) {
      EXPECT_GT(substitution_bound(m, t, next, SamplingMode::endpoint), pol.tolerance);
    }
  }
}

TEST(Substitution, BoundIsMinimumOfTwoCertificates) {
  const auto m = power_tail_model();
  const double t = 5000.0, eps = 2.5;
  const double m2 = 3.0 * (1.0 - 1.0 / eps);
  const double m3 = 3.0 * std::log(eps);
  const double be = 0.4748 * m3 / (std::sqrt(t) * std::pow(1.0 + m2, 1.5));
  // t M3 / 6 * int_0^t sup|phi''| for N(0, t + M2 r), integrated numerically
  double integral = 0.0;
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) {
    const double r = (i + 0.5) * t / steps;
    integral += std::pow(t + m2 * r, -1.5) * t / steps;
  }
  const double lindeberg = m3 / 6.0 / std::sqrt(2.0 * std::numbers::pi) * integral;
  EXPECT_NEAR(substitution_bound(m, t, eps, SamplingMode::endpoint), std::min(be, lindeberg), 1e-9 * lindeberg);
  EXPECT_LT(lindeberg, be);

  // Without a Brownian part only the Berry-Esseen certificate applies.
  const auto bare = build_model(0.0, MeasureSpec::power_tail({3.0, 3.0, 0.5, Side::positive}));
  const double m2b = 3.0 * (2.0 - 1.0 / eps), m3b = 3.0 * std::log(2.0 * eps);
  EXPECT_NEAR(substitution_bound(bare, t, eps, SamplingMode::endpoint),
              0.4748 * m3b / (std::sqrt(t) * std::pow(m2b, 1.5)), 1e-15);
}

TEST(Substitution, GaussianJumpsNeverSubstitutedAtEndpoint) {
  const auto m = build_model(0.5, MeasureSpec::compound_poisson({5.0, 0.1, 0.2}));
  EXPECT_EQ(choose_small_jump_eps(m, 1e6, SamplingMode::endpoint), 0.0);
  EXPECT_GT(choose_small_jump_eps(m, 1e6, SamplingMode::decomposed), 0.0);
}

TEST(Substitution, PreservesMeanAndVariance) {
  const auto m = power_tail_model();
  const double t = 2000.0;
  SimPlan plan{t, 60000, 8};
  plan.small_jump_eps = choose_small_jump_eps(m, t, SamplingMode::endpoint);
  ASSERT_GT(plan.small_jump_eps, 0.0);
  const auto xs = sample_endpoint(m, plan);
  std::vector<double> scaled(xs);
  for (auto& x : scaled) x /= std::sqrt(t);
  SimPlan exact_plan = plan;
  exact_plan.small_jump_eps = 0.0;
  exact_plan.seed = 9;
  auto ref = sample_endpoint(m, exact_plan);
  for (auto& x : ref) x /= std::sqrt(t);
  EXPECT_LE(two_sample_ks(scaled, ref),
            1.6276 * std::sqrt(2.0 / xs.size()) + substitution_bound(m, t, plan.small_jump_eps, SamplingMode::endpoint));
}

}  // namespace
