#include "irtid/special_fns.hpp"

#include <array>
#include <cmath>
#include <string>

#include "irtid/errors.hpp"

namespace irtid {
namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kSqrt2Pi = 2.50662827463100050242;

void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": non-finite argument");
  }
}

// Acklam's rational approximation (relative error < 1.2e-9), used only as a
// starting point for Halley refinement.
double quantile_initial(double u) {
  static constexpr std::array<double, 6> a = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  auto tail = [&](double q) {
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  };
  if (u < kLow) {
    return tail(std::sqrt(-2.0 * std::log(u)));
  }
  if (u > 1.0 - kLow) {
    return -tail(std::sqrt(-2.0 * std::log1p(-u)));
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_pdf(double x) {
  require_finite(x, "normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_log_pdf(double x) {
  require_finite(x, "normal_log_pdf");
  return -0.5 * x * x - kLogSqrt2Pi;
}

double normal_cdf(double x) {
  require_finite(x, "normal_cdf");
  return 0.5 * std::erfc(-x * kSqrt1_2);
}

double normal_ccdf(double x) {
  require_finite(x, "normal_ccdf");
  return 0.5 * std::erfc(x * kSqrt1_2);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("normal_quantile: argument must lie in (0,1)");
  }
  if (u == 0.5) return 0.0;
  double x = quantile_initial(u);
  // Residual is taken on the side of the distribution where it is small so
  // that neither tail loses relative precision.
  const bool upper = u > 0.5;
  const double target = upper ? 1.0 - u : u;
  for (int step = 0; step < 2; ++step) {
    const double tail_prob = upper ? normal_ccdf(x) : normal_cdf(x);
    const double e = upper ? -(tail_prob - target) : (tail_prob - target);
    const double t = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= t / (1.0 + 0.5 * x * t);
  }
  return x;
}

double logistic(double x) {
  require_finite(x, "logistic");
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_deriv(double x) {
  require_finite(x, "logistic_deriv");
  // 1/(eˣ + e⁻ˣ + 2) written in terms of s = e^{-|x|} ≤ 1.
  const double s = std::exp(-std::fabs(x));
  const double denom = 1.0 + s;
  return s / (denom * denom);
}

double logistic_log_deriv(double x) {
  require_finite(x, "logistic_log_deriv");
  const double ax = std::fabs(x);
  return -ax - 2.0 * std::log1p(std::exp(-ax));
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("logit: argument must lie in (0,1)");
  }
  return std::log(p) - std::log1p(-p);
}

}  // namespace irtid
