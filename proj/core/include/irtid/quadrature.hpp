#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace irtid {

/// Neumaier-compensated accumulator. Summation order is the call order, so
/// results are deterministic for a fixed sequence of add() calls.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(std::size_t order);

struct QuadratureOptions {
  std::size_t panels = 32;
  std::size_t nodes_per_panel = 32;
  /// The open interval (0,1) is integrated as [endpoint, 1 − endpoint].
  double endpoint = 1e-12;
  /// Panels adjacent to 0 and 1 are geometric, covering [endpoint, tail_edge]
  /// and [1 − tail_edge, 1 − endpoint]; the rest are uniform.
  double tail_edge = 0.05;
  /// Extra panel boundaries, e.g. δ and 1 − δ for indicator integrands.
  std::vector<double> breakpoints;
  /// integrate() throws QuadratureError when the embedded estimate exceeds this.
  double error_tolerance = 1e-9;
};

struct Integral {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Composite Gauss-Legendre rule on (0,1), refined geometrically toward both
/// endpoints where IRF derivatives blow up.
class UnitQuadrature {
 public:
  explicit UnitQuadrature(QuadratureOptions options = {});

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> panel_edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }
  const QuadratureOptions& options() const { return options_; }

  /// ∫ f over (0,1). The error estimate is the gap to an embedded rule of half
  /// the order on the same panels.
  template <typename F>
  Integral integrate(F&& f) const {
    KahanSum hi;
    KahanSum lo;
    for (std::size_t j = 0; j < nodes_.size(); ++j) hi.add(weights_[j] * f(nodes_[j]));
    for (std::size_t j = 0; j < coarse_nodes_.size(); ++j) {
      lo.add(coarse_weights_[j] * f(coarse_nodes_[j]));
    }
    return Integral{hi.value(), std::fabs(hi.value() - lo.value())};
  }

  /// integrate() that throws QuadratureError above the configured tolerance.
  template <typename F>
  double integrate_checked(F&& f) const {
    const Integral r = integrate(std::forward<F>(f));
    check(r);
    return r.value;
  }

 private:
  void check(const Integral& r) const;

  QuadratureOptions options_;
  std::vector<double> edges_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> coarse_nodes_;
  std::vector<double> coarse_weights_;
};

/// Shared default rule (32 panels × 32 nodes).
const UnitQuadrature& default_quadrature();

}  // namespace irtid
