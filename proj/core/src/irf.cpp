#include "irtid/irf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "irtid/errors.hpp"
#include "irtid/special_fns.hpp"

namespace irtid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute slack when comparing a witness supremum with ε; covers the last-ulp
// disagreement between Φ(Φ⁻¹(u)) and u.
constexpr double kWitnessSlack = 1e-12;

void require_open_unit(double theta, const char* fn) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError(std::string(fn) + ": theta must lie in the open interval (0,1), got " +
                      std::to_string(theta));
  }
}

LatentIrf latent_from_params(const ItemParams& p) {
  LatentIrf q;
  const double a = p.a;
  const double b = p.b;
  if (p.family == Family::NormalOgive) {
    q.value = [a, b](double x) { return normal_cdf(a * (x - b)); };
    q.slope = [a, b](double x) { return a * normal_pdf(a * (x - b)); };
    if (a > 0.0) {
      q.log_slope = [a, b](double x) { return std::log(a) + normal_log_pdf(a * (x - b)); };
    }
    q.lower_limit = a == 0.0 ? 0.5 : 0.0;
    q.upper_limit = a == 0.0 ? 0.5 : 1.0;
  } else {
    const double c = p.c;
    const double span = p.d - p.c;
    q.value = [a, b, c, span](double x) { return c + span * logistic(a * (x - b)); };
    q.slope = [a, b, span](double x) { return span * a * logistic_deriv(a * (x - b)); };
    if (a > 0.0) {
      q.log_slope = [a, b, span](double x) {
        return std::log(span) + std::log(a) + logistic_log_deriv(a * (x - b));
      };
    }
    q.lower_limit = a == 0.0 ? c + 0.5 * span : p.c;
    q.upper_limit = a == 0.0 ? c + 0.5 * span : p.d;
  }
  return q;
}

bool trend_agrees(const EndpointLimit& lim) {
  const auto& s = lim.samples;
  for (double v : s) {
    if (std::isnan(v) || v < 0.0) return false;
  }
  switch (lim.kind) {
    case LimitKind::Zero:
      return s[0] >= s[1] && s[1] >= s[2] && (s[2] < s[0] || s[0] == 0.0);
    case LimitKind::Infinite:
      return s[0] < s[1] && s[1] < s[2];
    case LimitKind::Finite: {
      const double tol = 1e-12 * std::max(1.0, lim.value);
      const double e0 = std::fabs(s[0] - lim.value);
      const double e1 = std::fabs(s[1] - lim.value);
      const double e2 = std::fabs(s[2] - lim.value);
      return e1 <= e0 + tol && e2 <= e1 + tol && e2 <= 1e-3 * std::max(1.0, lim.value);
    }
  }
  return false;
}

// Largest θ on a bisection path with pred(θ) true, assuming pred is monotone
// (true on a prefix of (0,1)).
template <typename Pred>
double bisect_boundary(Pred pred, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

std::string_view to_string(Family family) {
  return family == Family::NormalOgive ? "normal_ogive" : "4pl";
}

std::optional<Family> parse_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "normal_ogive" || lower == "normal-ogive" || lower == "no" ||
      lower == "normalogive") {
    return Family::NormalOgive;
  }
  if (lower == "4pl" || lower == "logistic4pl" || lower == "logistic_4pl") {
    return Family::Logistic4PL;
  }
  return std::nullopt;
}

ItemParams ItemParams::normal_ogive(double a, double b) {
  return ItemParams{Family::NormalOgive, a, b, 0.0, 1.0, false};
}

ItemParams ItemParams::logistic_4pl(double a, double b, double c, double d) {
  return ItemParams{Family::Logistic4PL, a, b, c, d, false};
}

void ItemParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    throw ValidationError("item parameters must be finite");
  }
  if (family == Family::NormalOgive) {
    if (c != 0.0 || d != 1.0) {
      throw ValidationError("normal ogive items have c = 0 and d = 1");
    }
    return;
  }
  if (!(c >= 0.0 && d <= 1.0 && c < d)) {
    throw ValidationError("4PL items require 0 <= c < d <= 1");
  }
}

ItemParams ItemParams::normalized() const {
  if (a >= 0.0) return *this;
  ItemParams out = *this;
  out.a = -a;
  out.b = -b;
  out.reflected = !reflected;
  return out;
}

TraitDistribution TraitDistribution::standard_normal() {
  return TraitDistribution{"standard_normal", normal_cdf, normal_quantile, normal_pdf,
                           normal_log_pdf};
}

TraitDistribution TraitDistribution::standard_logistic() {
  return TraitDistribution{"standard_logistic", logistic, logit, logistic_deriv,
                           logistic_log_deriv};
}

struct Irf::Impl {
  LatentIrf q;
  TraitDistribution trait;
  std::optional<ItemParams> params;
};

Irf::Irf(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Irf transform_irf(LatentIrf q, TraitDistribution trait_cdf) {
  if (!q.value || !q.slope) {
    throw ValidationError("transform_irf: latent IRF needs value and slope");
  }
  if (!trait_cdf.cdf || !trait_cdf.quantile || !trait_cdf.pdf) {
    throw ValidationError("transform_irf: trait distribution needs cdf, quantile and pdf");
  }
  auto impl = std::make_shared<Irf::Impl>();
  impl->q = std::move(q);
  impl->trait = std::move(trait_cdf);
  return Irf(std::move(impl));
}

Irf Irf::from_params(const ItemParams& params) {
  params.validate();
  const ItemParams norm = params.normalized();
  auto impl = std::make_shared<Impl>();
  impl->q = latent_from_params(norm);
  impl->trait = TraitDistribution::standard_normal();
  impl->params = norm;
  return Irf(std::move(impl));
}

Irf Irf::identity() { return from_params(ItemParams::normal_ogive(1.0, 0.0)); }

double Irf::latent_coordinate(double theta) const {
  require_open_unit(theta, "Irf::latent_coordinate");
  return impl_->trait.quantile(theta);
}

double Irf::eval_latent(double lambda) const { return impl_->q.value(lambda); }

double Irf::deriv_latent(double x) const {
  if (impl_->q.log_slope && impl_->trait.log_pdf) {
    return std::exp(impl_->q.log_slope(x) - impl_->trait.log_pdf(x));
  }
  const double slope = impl_->q.slope(x);
  if (slope == 0.0) return 0.0;
  return slope / impl_->trait.pdf(x);
}

double Irf::eval(double theta) const { return eval_latent(latent_coordinate(theta)); }

double Irf::deriv(double theta) const {
  require_open_unit(theta, "Irf::deriv");
  return deriv_latent(impl_->trait.quantile(theta));
}

double Irf::kappa() const { return impl_->q.lower_limit; }
double Irf::gamma() const { return impl_->q.upper_limit; }
const std::optional<ItemParams>& Irf::params() const { return impl_->params; }
const LatentIrf& Irf::latent_irf() const { return impl_->q; }
const TraitDistribution& Irf::trait() const { return impl_->trait; }

double eval_4pl(const ItemParams& params, double theta) {
  if (params.family != Family::Logistic4PL) {
    throw ValidationError("eval_4pl: item is not a 4PL item");
  }
  return Irf::from_params(params).eval(theta);
}

double deriv_4pl(const ItemParams& params, double theta) {
  if (params.family != Family::Logistic4PL) {
    throw ValidationError("deriv_4pl: item is not a 4PL item");
  }
  return Irf::from_params(params).deriv(theta);
}

std::string_view to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::Zero: return "zero";
    case LimitKind::Finite: return "finite";
    case LimitKind::Infinite: return "infinite";
  }
  return "?";
}

DerivativeLimits derivative_limits(const ItemParams& params) {
  const ItemParams p = params.normalized();
  DerivativeLimits out;
  auto set = [](EndpointLimit& lim, LimitKind kind, double value) {
    lim.kind = kind;
    lim.value = value;
  };

  if (p.a == 0.0) {
    set(out.lower, LimitKind::Zero, 0.0);
    set(out.upper, LimitKind::Zero, 0.0);
  } else if (p.family == Family::Logistic4PL) {
    set(out.lower, LimitKind::Infinite, kInf);
    set(out.upper, LimitKind::Infinite, kInf);
  } else {
    // log P' = log a − (a² − 1)x²/2 + a²b x − a²b²/2 with x = Φ⁻¹(θ).
    const double a2 = p.a * p.a;
    if (a2 < 1.0) {
      set(out.lower, LimitKind::Infinite, kInf);
      set(out.upper, LimitKind::Infinite, kInf);
    } else if (a2 > 1.0) {
      set(out.lower, LimitKind::Zero, 0.0);
      set(out.upper, LimitKind::Zero, 0.0);
    } else if (p.b > 0.0) {
      set(out.lower, LimitKind::Zero, 0.0);
      set(out.upper, LimitKind::Infinite, kInf);
    } else if (p.b < 0.0) {
      set(out.lower, LimitKind::Infinite, kInf);
      set(out.upper, LimitKind::Zero, 0.0);
    } else {
      set(out.lower, LimitKind::Finite, p.a);
      set(out.upper, LimitKind::Finite, p.a);
    }
  }

  const Irf irf = Irf::from_params(p);
  static constexpr std::array<double, 3> kOffsets = {1e-4, 1e-6, 1e-8};
  for (std::size_t j = 0; j < kOffsets.size(); ++j) {
    out.lower.samples[j] = irf.deriv(kOffsets[j]);
    out.upper.samples[j] = irf.deriv(1.0 - kOffsets[j]);
  }
  out.lower.trend_agrees = trend_agrees(out.lower);
  out.upper.trend_agrees = trend_agrees(out.upper);
  return out;
}

DerivativeBounds check_condition3(const Irf& irf, double alpha, double beta,
                                  std::size_t grid_size) {
  if (!(alpha > 0.0 && alpha < beta && beta < 1.0)) {
    throw DomainError("check_condition3: require 0 < alpha < beta < 1");
  }
  if (grid_size < 3) {
    throw DomainError("check_condition3: grid_size must be at least 3");
  }
  DerivativeBounds out;
  out.alpha = alpha;
  out.beta = beta;
  out.m = kInf;
  out.M = -kInf;
  const double step = (beta - alpha) / static_cast<double>(grid_size - 1);
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double theta = j + 1 == grid_size ? beta : alpha + step * static_cast<double>(j);
    double d = 0.0;
    try {
      d = irf.deriv(theta);
    } catch (const std::exception& e) {
      throw DomainError("check_condition3: derivative failed at theta=" +
                        std::to_string(theta) + ": " + e.what());
    }
    if (std::isnan(d)) {
      throw DomainError("check_condition3: derivative is NaN at theta=" + std::to_string(theta));
    }
    if (d < out.m) {
      out.m = d;
      out.argmin = theta;
    }
    if (d > out.M) {
      out.M = d;
      out.argmax = theta;
    }
  }
  out.pass = out.m > 0.0 && std::isfinite(out.M);
  return out;
}

TailFlatnessWitness check_condition4(const Irf& irf, double epsilon, double grid_step) {
  TailFlatnessWitness w;
  w.epsilon = epsilon;
  w.kappa = irf.kappa();
  w.gamma = irf.gamma();
  if (!(epsilon > 0.0 && epsilon < w.gamma - w.kappa)) {
    throw DomainError("check_condition4: epsilon must lie in (0, gamma - kappa)");
  }
  if (!(grid_step > 0.0)) {
    throw DomainError("check_condition4: grid_step must be positive");
  }

  if (const auto& p = irf.params(); p && p->a > 0.0) {
    w.method = WitnessMethod::ClosedForm;
    w.c_a = std::max(p->a, 1.0 / p->a);
    w.c_b = std::fabs(p->b);
    w.c_cd = p->d - p->c;
    const double level = epsilon / w.c_cd;
    const double y = p->family == Family::NormalOgive ? normal_quantile(level) : logit(level);
    const double shift = (y < 0.0 ? w.c_a * y : y / w.c_a) - w.c_b;
    w.l_eps = normal_cdf(shift);
    w.u_eps = normal_ccdf(shift);
    // 1 − l_ε is rarely representable; round u_ε toward 1 until the bound holds.
    if (w.u_eps >= 1.0) w.u_eps = std::nextafter(1.0, 0.0);
    for (int step = 0; step < 64 && w.u_eps < 1.0 && w.gamma - irf.eval(w.u_eps) > epsilon;
         ++step) {
      w.u_eps = std::nextafter(w.u_eps, 1.0);
    }
  } else {
    w.method = WitnessMethod::Numeric;
    const double lo = 1e-300;
    const double hi = 1.0 - 1e-16;
    w.l_eps = bisect_boundary([&](double t) { return irf.eval(t) - w.kappa <= epsilon; }, lo, hi);
    // Mirror: find the smallest u with γ − P(u) ≤ ε by bisecting on 1 − u.
    const double one_minus_u = bisect_boundary(
        [&](double s) { return w.gamma - irf.eval(1.0 - s) <= epsilon; }, 1e-16, 1.0 - lo);
    w.u_eps = 1.0 - one_minus_u;
  }

  const bool inside = w.l_eps > 0.0 && w.l_eps < 1.0 && w.u_eps > 0.0 && w.u_eps < 1.0;
  if (inside) {
    auto points = [&](double width) {
      return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(width / grid_step)));
    };
    const std::size_t g_low = points(w.l_eps);
    for (std::size_t j = 1; j <= g_low; ++j) {
      const double theta = j == g_low ? w.l_eps : w.l_eps * static_cast<double>(j) / g_low;
      w.sup_low = std::max(w.sup_low, irf.eval(theta) - w.kappa);
    }
    const double width_high = 1.0 - w.u_eps;
    const std::size_t g_high = points(width_high);
    for (std::size_t j = 0; j < g_high; ++j) {
      const double theta = w.u_eps + width_high * static_cast<double>(j) / g_high;
      if (theta >= 1.0) break;
      w.sup_high = std::max(w.sup_high, w.gamma - irf.eval(theta));
    }
  }
  w.pass = inside && w.sup_low <= epsilon + kWitnessSlack &&
           w.sup_high <= epsilon + kWitnessSlack;
  return w;
}

}  // namespace irtid
