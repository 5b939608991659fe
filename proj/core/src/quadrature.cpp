#include "irtid/quadrature.hpp"

#include <algorithm>
#include <numbers>
#include <utility>
#include <sstream>

#include "irtid/errors.hpp"

namespace irtid {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t order, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= order; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

GaussLegendreRule gauss_legendre(std::size_t order) {
  if (order < 2) throw DomainError("gauss_legendre: order must be at least 2");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pn1] = legendre(order, x);
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const auto [pn, pn1] = legendre(order, x);
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

namespace {

std::vector<double> build_edges(const QuadratureOptions& o) {
  if (o.panels < 3) throw DomainError("UnitQuadrature: need at least 3 panels");
  if (!(o.endpoint > 0.0 && o.endpoint < o.tail_edge && o.tail_edge < 0.5)) {
    throw DomainError("UnitQuadrature: require 0 < endpoint < tail_edge < 0.5");
  }
  const std::size_t tail = std::max<std::size_t>(1, o.panels / 4);
  const std::size_t middle = o.panels - 2 * tail;
  std::vector<double> left(tail + 1);
  const double ratio = std::log(o.tail_edge / o.endpoint) / static_cast<double>(tail);
  for (std::size_t j = 0; j <= tail; ++j) {
    left[j] = j == tail ? o.tail_edge : o.endpoint * std::exp(ratio * static_cast<double>(j));
  }
  std::vector<double> edges = left;
  const double lo = o.tail_edge;
  const double hi = 1.0 - o.tail_edge;
  for (std::size_t j = 1; j < middle; ++j) {
    edges.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(middle));
  }
  for (std::size_t j = tail + 1; j-- > 0;) edges.push_back(1.0 - left[j]);

  for (double bp : o.breakpoints) {
    if (bp > edges.front() && bp < edges.back()) edges.push_back(bp);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

void fill(const std::vector<double>& edges, const GaussLegendreRule& rule,
          std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      nodes.push_back(mid + half * rule.nodes[j]);
      weights.push_back(half * rule.weights[j]);
    }
  }
}

}  // namespace

UnitQuadrature::UnitQuadrature(QuadratureOptions options) : options_(std::move(options)) {
  if (options_.nodes_per_panel < 2) {
    throw DomainError("UnitQuadrature: need at least 2 nodes per panel");
  }
  edges_ = build_edges(options_);
  fill(edges_, gauss_legendre(options_.nodes_per_panel), nodes_, weights_);
  fill(edges_, gauss_legendre(options_.nodes_per_panel / 2), coarse_nodes_, coarse_weights_);
}

void UnitQuadrature::check(const Integral& r) const {
  if (!(r.error_estimate <= options_.error_tolerance) || !std::isfinite(r.value)) {
    std::ostringstream msg;
    msg << "quadrature did not converge: error estimate " << r.error_estimate
        << " exceeds tolerance " << options_.error_tolerance;
    throw QuadratureError(msg.str(), r.error_estimate);
  }
}

const UnitQuadrature& default_quadrature() {
  static const UnitQuadrature rule{};
  return rule;
}

}  // namespace irtid
