#include <cmath>

#include <gtest/gtest.h>

#include "levyclt/verify.hpp"

namespace {

using namespace levyclt;

LevyModel power_tail_model() {
  return build_model(1.0, MeasureSpec::power_tail({3.0, 3.0, 1.0, Side::positive}));
}
LevyModel log_perturbed(double gamma, double gaussian_var = 1.0) {
  return build_model(gaussian_var, MeasureSpec::log_perturbed_power_tail({gamma, 1.0, Side::positive}));
}

TEST(Grid, LogSpaced) {
  const auto ts = grid_times({1.0, 1e6, 50});
  ASSERT_EQ(ts.size(), 50u);
  EXPECT_EQ(ts.front(), 1.0);
  EXPECT_EQ(ts.back(), 1e6);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    EXPECT_GT(ts[i], ts[i - 1]);
    EXPECT_NEAR(std::log(ts[i] / ts[i - 1]), std::log(1e6) / 49.0, 1e-12);
  }
  EXPECT_EQ(grid_times({3.0, 3.0, 1}).size(), 1u);
  EXPECT_THROW(grid_times({0.5, 10.0, 5}), DomainError);
  EXPECT_THROW(grid_times({10.0, 5.0, 5}), DomainError);
  EXPECT_THROW(grid_times({1.0, 5.0, 0}), DomainError);
}

TEST(Deficit, PowerTailClosedForm) {
  const auto m = power_tail_model();
  for (double T : {10.0, 1e3, 1e6, 1e12}) {
    const auto d = sigma_deficit_integral(m, T);
    EXPECT_NEAR(d.rhs, 6.0 - 6.0 / std::sqrt(T), 1e-10) << T;
    EXPECT_NEAR(d.lhs, d.rhs, 1e-5 * d.rhs) << T;
  }
  EXPECT_EQ(sigma_deficit_integral(m, 1.0).rhs, 0.0);
  EXPECT_THROW(sigma_deficit_integral(m, 0.5), DomainError);
}

TEST(Deficit, LogPerturbedClosedForms) {
  for (double T : {10.0, 1e3, 1e6}) {
    const double h = 0.5 * std::log(T);
    const auto thin = sigma_deficit_integral(log_perturbed(3.0), T);
    const auto heavy = sigma_deficit_integral(log_perturbed(1.5), T);
    ASSERT_GT(h, 1.0);
    const double thin_rhs = 2.0 - 1.0 / h;
    const double heavy_rhs = 8.0 * std::sqrt(h) - 4.0;
    EXPECT_NEAR(thin.rhs, thin_rhs, 1e-9) << T;
    EXPECT_NEAR(heavy.rhs, heavy_rhs, 1e-8) << T;
    EXPECT_NEAR(thin.lhs, thin.rhs, 1e-5 * thin.rhs);
    EXPECT_NEAR(heavy.lhs, heavy.rhs, 1e-5 * heavy.rhs);
  }
}

TEST(Deficit, ZeroMeasure) {
  const auto d = sigma_deficit_integral(build_model(1.0, MeasureSpec::zero()), 1e6);
  EXPECT_EQ(d.lhs, 0.0);
  EXPECT_EQ(d.rhs, 0.0);
}

TEST(Deficit, NondecreasingInHorizon) {
  const auto m = build_model(0.0, MeasureSpec::mixture({PowerTail{3.0, 3.0, 0.5, Side::negative},
                                                        GaussianJumps{1.0, 2.0, 1.0}}));
  double prev = 0.0;
  for (double T = 1.0; T < 1e9; T *= 10.0) {
    const double r = sigma_deficit_integral(m, T).rhs;
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(Regime, Classifier) {
  EXPECT_EQ(classify_regime(log_perturbed(1.5)).prediction, RegimePrediction::only_sigma_t_finite);
  EXPECT_EQ(classify_regime(log_perturbed(3.0)).prediction, RegimePrediction::both_integrals_finite);
  EXPECT_EQ(classify_regime(build_model(1.0, MeasureSpec::zero())).prediction,
            RegimePrediction::both_integrals_finite);
  EXPECT_STREQ(prediction_name(RegimePrediction::only_sigma_t_finite), "OnlySigmaTFinite");
}

TEST(Scan, SmallBrownianScan) {
  const auto m = build_model(1.0, MeasureSpec::zero());
  SimConfig cfg;
  cfg.samples = 4000;
  cfg.seed = 12;
  cfg.threads = 1;
  const auto r = scan(m, {1.0, 100.0, 5}, cfg);
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_EQ(r.sigma, 1.0);
  EXPECT_EQ(r.rows.front().integral_sigma_t, 0.0);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    EXPECT_EQ(row.sigma_t, 1.0);
    EXPECT_EQ(row.ks_sigma_t.value, row.ks_sigma.value);
    EXPECT_EQ(row.bound.total, 0.0);
    EXPECT_EQ(row.small_jump_eps, 0.0);
    if (i) {
      EXPECT_GE(row.integral_sigma_t, r.rows[i - 1].integral_sigma_t);
    }
  }
  EXPECT_EQ(decay_integral(r, Normalization::sigma_t).estimate, r.rows.back().integral_sigma_t);
}

TEST(Scan, ReproducibleAndThreadIndependent) {
  const auto m = power_tail_model();
  SimConfig cfg;
  cfg.samples = 3000;
  cfg.chunk = 512;
  cfg.threads = 1;
  const auto a = scan(m, {1.0, 1e3, 4}, cfg);
  cfg.threads = 3;
  const auto b = scan(m, {1.0, 1e3, 4}, cfg);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].ks_sigma_t.value, b.rows[i].ks_sigma_t.value);
    EXPECT_EQ(a.rows[i].integral_sigma, b.rows[i].integral_sigma);
  }
}

TEST(Scan, GridPointSeedsDiffer) {
  EXPECT_NE(grid_point_seed(1, 0), grid_point_seed(1, 1));
  EXPECT_NE(grid_point_seed(1, 0), grid_point_seed(2, 0));
  EXPECT_EQ(grid_point_seed(5, 3), grid_point_seed(5, 3));
}

}  // namespace
