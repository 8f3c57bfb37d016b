#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "levyclt/normal.hpp"

namespace {

// erf(z) = 2/sqrt(pi) exp(-z^2) sum_n 2^n z^(2n+1) / (2n+1)!!, all terms positive.
long double series_cdf(long double x) {
  const long double z = std::fabs(x) / std::sqrt(2.0L);
  long double term = z;
  long double sum = z;
  for (int n = 1; n < 400; ++n) {
    term *= 2.0L * z * z / (2.0L * n + 1.0L);
    sum += term;
    if (term < sum * 1e-21L) break;
  }
  const long double erf = 2.0L / std::sqrt(std::numbers::pi_v<long double>) * std::exp(-z * z) * sum;
  return x >= 0 ? 0.5L * (1.0L + erf) : 0.5L * (1.0L - erf);
}

TEST(Normal, CdfMatchesSeriesOracle) {
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    EXPECT_NEAR(levyclt::normal_cdf(x), static_cast<double>(series_cdf(x)), 2e-16) << x;
  }
}

TEST(Normal, KnownQuantile) {
  EXPECT_NEAR(levyclt::normal_cdf(1.96), 0.9750021048517795, 1e-16);
  EXPECT_DOUBLE_EQ(levyclt::normal_cdf(0.0), 0.5);
}

TEST(Normal, SymmetryAndTails) {
  for (double x : {0.1, 1.0, 3.0, 8.0, 20.0}) {
    EXPECT_DOUBLE_EQ(levyclt::normal_sf(x), levyclt::normal_cdf(-x));
  }
  EXPECT_GT(levyclt::normal_sf(30.0), 0.0);
  EXPECT_NEAR(levyclt::normal_sf(10.0) / 7.619853024160527e-24, 1.0, 1e-13);
}

TEST(Normal, IntervalIsCancellationFree) {
  EXPECT_NEAR(levyclt::normal_interval(9.0, 10.0), levyclt::normal_sf(9.0) - levyclt::normal_sf(10.0),
              1e-30);
  EXPECT_GT(levyclt::normal_interval(9.0, 10.0), 0.0);
  EXPECT_NEAR(levyclt::normal_interval(-1.0, 1.0), 0.6826894921370859, 1e-15);
}

TEST(Normal, InverseSurvivalRoundTrips) {
  for (double q : {0.5, 0.1, 1e-3, 1e-10, 1e-100}) {
    EXPECT_NEAR(levyclt::normal_sf(levyclt::normal_isf(q)) / q, 1.0, 1e-12) << q;
  }
}

}  // namespace
