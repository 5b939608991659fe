#pragma once

// Scalar special functions used by every IRF formula. All functions are pure
// and throw DomainError on inputs outside their stated domain.

namespace irtid {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal density.
double normal_pdf(double x);

/// log of the standard normal density; finite for every finite x.
double normal_log_pdf(double x);

/// Standard normal CDF Φ(x). Uses erfc on both branches so tails keep full
/// relative accuracy.
double normal_cdf(double x);

/// 1 − Φ(x), computed without cancellation.
double normal_ccdf(double x);

/// Φ⁻¹(u) for u ∈ (0,1). Rational initial guess refined by Halley steps.
double normal_quantile(double u);

/// g(x) = eˣ / (1 + eˣ), overflow-free for any finite x.
double logistic(double x);

/// g'(x) = 1 / (eˣ + e⁻ˣ + 2) = g(x)(1 − g(x)).
double logistic_deriv(double x);

/// log g'(x); finite for every finite x.
double logistic_log_deriv(double x);

/// g⁻¹(p) = log(p / (1 − p)) for p ∈ (0,1).
double logit(double p);

}  // namespace irtid
