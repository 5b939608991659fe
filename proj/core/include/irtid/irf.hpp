#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace irtid {

enum class Family { NormalOgive, Logistic4PL };

std::string_view to_string(Family family);
/// Accepts "normal_ogive"/"normal-ogive"/"no" and "4pl"/"logistic4pl".
std::optional<Family> parse_family(std::string_view name);

/// Parameters of a parametric item on the latent N(0,1) scale.
///
/// Normal ogive:  Q(λ) = Φ(a(λ − b)), with c = 0 and d = 1 fixed.
/// 4PL:           Q(λ) = c + (d − c) g(a(λ − b)).
///
/// Rasch, 2PL and 3PL items are 4PL specializations (a = 1, c = 0, d = 1 ...).
struct ItemParams {
  Family family = Family::NormalOgive;
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
  /// Set when a decreasing item (a < 0) was normalized by θ ↦ 1 − θ.
  bool reflected = false;

  static ItemParams normal_ogive(double a, double b);
  static ItemParams logistic_4pl(double a, double b, double c, double d);

  /// Throws ValidationError on non-finite values, or c/d outside
  /// 0 ≤ c < d ≤ 1 (4PL), or c/d different from 0/1 (normal ogive).
  void validate() const;

  /// Reflection θ ↦ 1 − θ turns a decreasing item into an increasing one;
  /// on the latent scale this is (a, b) ↦ (−a, −b). Identity when a ≥ 0.
  ItemParams normalized() const;

  friend bool operator==(const ItemParams&, const ItemParams&) = default;
};

/// An IRF Q(λ) on an arbitrary latent scale, with its derivative and the
/// limits at λ → −∞ and λ → +∞.
struct LatentIrf {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  /// Optional log Q'(λ); lets the transformed derivative be formed as a
  /// difference of logs, which stays finite deep in the tails.
  std::function<double(double)> log_slope;
  double lower_limit = 0.0;
  double upper_limit = 1.0;
};

/// Continuous, strictly increasing latent-trait distribution.
struct TraitDistribution {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  std::function<double(double)> pdf;
  std::function<double(double)> log_pdf;  // optional

  static TraitDistribution standard_normal();
  static TraitDistribution standard_logistic();
};

/// Item response function on the U(0,1) trait scale. Immutable; copies share
/// the underlying representation.
class Irf {
 public:
  /// Builds the U(0,1) form of a parametric item (N(0,1) latent trait).
  /// a < 0 is normalized by reflection; a = 0 yields a flat IRF, which
  /// ModelSpec rejects.
  static Irf from_params(const ItemParams& params);
  /// P(θ) = θ, i.e. the normal ogive with a = 1, b = 0.
  static Irf identity();

  /// P(θ); θ must lie in the open interval (0,1).
  double eval(double theta) const;
  /// P'(θ) = Q'(F⁻¹(θ)) / f(F⁻¹(θ)).
  double deriv(double theta) const;

  /// Latent coordinate λ = F⁻¹(θ) and evaluation on the latent scale. Items
  /// sharing a trait distribution can share one quantile evaluation.
  double latent_coordinate(double theta) const;
  double eval_latent(double lambda) const;
  double deriv_latent(double lambda) const;

  /// Asymptotes κ = lim_{θ↓0} P and γ = lim_{θ↑1} P.
  double kappa() const;
  double gamma() const;

  const std::optional<ItemParams>& params() const;
  const LatentIrf& latent_irf() const;
  const TraitDistribution& trait() const;

  /// True when both handles refer to the same underlying IRF object.
  bool shares_representation(const Irf& other) const { return impl_ == other.impl_; }

 private:
  struct Impl;
  explicit Irf(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;

  friend Irf transform_irf(LatentIrf q, TraitDistribution trait_cdf);
};

/// Reparameterizes Q on a latent trait with CDF F into the equivalent IRF on
/// a U(0,1) trait: P(θ) = Q(F⁻¹(θ)). The derivative is evaluated by the chain
/// rule, never by differencing.
Irf transform_irf(LatentIrf q, TraitDistribution trait_cdf);

/// Evaluate a parametric item directly from its parameters (θ ∈ (0,1)).
double eval_4pl(const ItemParams& params, double theta);
double deriv_4pl(const ItemParams& params, double theta);

// --- endpoint behaviour of P' -----------------------------------------------

enum class LimitKind { Zero, Finite, Infinite };
std::string_view to_string(LimitKind kind);

struct EndpointLimit {
  LimitKind kind = LimitKind::Zero;
  double value = 0.0;  // meaningful for Finite; 0 or +inf otherwise
  /// P' at θ = 1e-4, 1e-6, 1e-8 (lower) or 1 − 1e-4, 1 − 1e-6, 1 − 1e-8.
  std::array<double, 3> samples{};
  bool trend_agrees = false;
};

struct DerivativeLimits {
  EndpointLimit lower;  // θ ↓ 0
  EndpointLimit upper;  // θ ↑ 1
  bool trend_agrees() const { return lower.trend_agrees && upper.trend_agrees; }
};

/// Analytic classification of lim P'(θ) at both endpoints, corroborated by
/// the trend of P' over three points approaching each endpoint.
DerivativeLimits derivative_limits(const ItemParams& params);

// --- regularity certificates -------------------------------------------------

inline constexpr std::size_t kDefaultCertificateGrid = 1001;

struct DerivativeBounds {
  double alpha = 0.0;
  double beta = 0.0;
  double m = 0.0;  // min P' over the grid
  double M = 0.0;  // max P' over the grid
  double argmin = 0.0;
  double argmax = 0.0;
  bool pass = false;
};

/// Grid certificate for 0 < m ≤ P' ≤ M < ∞ on [alpha, beta].
DerivativeBounds check_condition3(const Irf& irf, double alpha, double beta,
                                  std::size_t grid_size = kDefaultCertificateGrid);

enum class WitnessMethod { ClosedForm, Numeric };

struct TailFlatnessWitness {
  double epsilon = 0.0;
  double l_eps = 0.0;
  double u_eps = 0.0;
  double sup_low = 0.0;   // sup_{θ ∈ (0, l_eps]} P(θ) − κ
  double sup_high = 0.0;  // sup_{θ ∈ [u_eps, 1)} γ − P(θ)
  double kappa = 0.0;
  double gamma = 1.0;
  // Constants of the closed-form construction (ClosedForm only).
  double c_a = 0.0;
  double c_b = 0.0;
  double c_cd = 0.0;
  WitnessMethod method = WitnessMethod::ClosedForm;
  bool pass = false;
};

/// Tail-flatness witness (l_ε, u_ε) for P, checked on tail grids whose
/// spacing is at most `grid_step`.
///
/// Parametric items use the closed-form construction
///   y = L⁻¹(ε / C_cd),  l_ε = Φ(s(y) − C_b),  u_ε = 1 − l_ε,
/// with L = Φ (normal ogive) or g (4PL), s(y) = C_a·y for y < 0 and y / C_a
/// otherwise. The constants are the tightest ones covering the item:
/// C_a = max(a, 1/a), C_b = |b|, C_cd = d − c.
/// u_ε is rounded toward 1 to the nearest double that satisfies the bound;
/// if none exists below 1 the witness fails.
/// Other IRFs fall back to bisection for P(l) − κ = ε and γ − P(u) = ε.
TailFlatnessWitness check_condition4(const Irf& irf, double epsilon,
                                     double grid_step = 1e-3);

}  // namespace irtid
