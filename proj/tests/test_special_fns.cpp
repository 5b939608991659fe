#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "irtid/errors.hpp"
#include "irtid/special_fns.hpp"

using namespace irtid;

TEST(NormalCdf, KnownValues) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145705, 1e-14);
  EXPECT_NEAR(normal_cdf(40.0), 1.0, 1e-15);
  EXPECT_NEAR(normal_cdf(-8.0), 6.2209605742717841e-16, 1e-28);
}

TEST(NormalCdf, ComplementKeepsTailPrecision) {
  EXPECT_NEAR(normal_ccdf(8.0) / 6.2209605742717841e-16, 1.0, 1e-13);
  EXPECT_DOUBLE_EQ(normal_ccdf(-1.0), normal_cdf(1.0));
}

TEST(NormalCdf, RejectsNonFinite) {
  EXPECT_THROW(normal_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(normal_cdf(std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(normal_pdf(std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(logistic(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(NormalCdf, MonotoneOnRandomPairs) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> x(-8.0, 8.0);
  for (int i = 0; i < 10000; ++i) {
    double x1 = x(gen);
    double x2 = x(gen);
    if (x1 > x2) std::swap(x1, x2);
    EXPECT_LE(normal_cdf(x1), normal_cdf(x2));
  }
}

TEST(NormalCdf, DerivativeMatchesDensity) {
  const double h = 1e-5;
  for (double x = -6.0; x <= 6.0; x += 0.01) {
    const double fd = (normal_cdf(x + h) - normal_cdf(x - h)) / (2 * h);
    EXPECT_NEAR(fd, normal_pdf(x), 1e-8) << "x=" << x;
  }
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.1586552539), -1.0, 1e-9);
  EXPECT_NEAR(normal_quantile(normal_cdf(2.3)), 2.3, 1e-12);
}

TEST(NormalQuantile, RejectsClosedEndpoints) {
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
  EXPECT_THROW(normal_quantile(-0.1), DomainError);
  EXPECT_THROW(normal_quantile(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(NormalQuantile, RoundTripFromProbability) {
  // Log-spaced toward both ends plus a uniform sweep.
  for (double e = -10.0; e <= -0.5; e += 0.01) {
    const double u = std::pow(10.0, e);
    EXPECT_LE(std::fabs(normal_cdf(normal_quantile(u)) - u), 1e-12) << u;
    EXPECT_LE(std::fabs(normal_cdf(normal_quantile(1.0 - u)) - (1.0 - u)), 1e-12) << 1.0 - u;
  }
  for (int j = 1; j < 10000; ++j) {
    const double u = j / 10000.0;
    EXPECT_LE(std::fabs(normal_cdf(normal_quantile(u)) - u), 1e-12) << u;
  }
}

TEST(NormalQuantile, RoundTripFromCoordinate) {
  for (double x = -8.0; x <= 0.0; x += 0.005) {
    EXPECT_NEAR(normal_quantile(normal_cdf(x)), x, 1e-12 * std::max(1.0, std::fabs(x))) << x;
    EXPECT_NEAR(normal_quantile(normal_ccdf(-x)), x, 1e-12 * std::max(1.0, std::fabs(x))) << x;
  }
}

TEST(NormalQuantile, StrictlyIncreasing) {
  double prev = -std::numeric_limits<double>::infinity();
  for (int j = 1; j < 100000; ++j) {
    const double q = normal_quantile(j / 100000.0);
    EXPECT_GT(q, prev);
    prev = q;
  }
}

TEST(NormalPdf, KnownValues) {
  EXPECT_NEAR(normal_pdf(0.0), 0.39894228040143268, 0.39894228040143268 * 1e-15);
  EXPECT_EQ(normal_pdf(-1.7), normal_pdf(1.7));
  EXPECT_LT(normal_pdf(10.0), 1e-21);
  EXPECT_NEAR(normal_pdf(10.0) / 7.6945986267064193e-23, 1.0, 1e-14);
  EXPECT_NEAR(normal_log_pdf(40.0), -800.0 - kLogSqrt2Pi, 1e-12);
}

TEST(Logistic, KnownValues) {
  EXPECT_EQ(logistic(0.0), 0.5);
  EXPECT_EQ(logistic_deriv(0.0), 0.25);
  EXPECT_NEAR(logistic(3.0), 0.95257412682243322, 1e-15);
  EXPECT_NO_THROW(logistic(-745.0));
  EXPECT_LT(logistic(-745.0), 1e-300);
  EXPECT_EQ(logistic(745.0), 1.0);
  EXPECT_NEAR(logit(logistic(-2.5)), -2.5, 1e-13);
}

TEST(Logistic, DerivativeClosedForms) {
  for (double x = -30.0; x <= 30.0; x += 0.01) {
    const double g = logistic(x);
    const double e = std::exp(x) + std::exp(-x);
    const double closed = (1.0 / e) / (1.0 + 2.0 / e);
    EXPECT_NEAR(logistic_deriv(x), g * (1.0 - g), 1e-14) << x;
    EXPECT_NEAR(logistic_deriv(x), closed, 1e-14) << x;
    EXPECT_NEAR(logistic_log_deriv(x), std::log(closed), 1e-12) << x;
  }
}

TEST(Logistic, DerivativeMatchesFiniteDifferences) {
  const double h = 1e-5;
  for (double x = -30.0; x <= 30.0; x += 0.05) {
    const double fd = (logistic(x + h) - logistic(x - h)) / (2 * h);
    EXPECT_NEAR(fd, logistic_deriv(x), 1e-8) << x;
  }
}

TEST(Logistic, StableForLargeArguments) {
  EXPECT_TRUE(std::isfinite(logistic_log_deriv(700.0)));
  EXPECT_TRUE(std::isfinite(logistic_log_deriv(-700.0)));
  EXPECT_NEAR(logistic_log_deriv(700.0), -700.0, 1e-9);
}
