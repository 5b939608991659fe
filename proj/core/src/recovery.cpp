#include "irtid/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "irtid/errors.hpp"
#include "irtid/parallel.hpp"

namespace irtid {
namespace {

constexpr double kInvertTolerance = 1e-12;
constexpr std::size_t kBracketGrid = 257;
// Stand-ins for the endpoints 0 and 1 when a comparison interval is all of (0,1).
constexpr double kOpenEdge = 1e-12;

void require_theta(double theta, const char* fn) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError(std::string(fn) + ": theta must lie in (0,1), got " +
                      std::to_string(theta));
  }
}

void require_interval(double alpha, double beta, const char* fn) {
  if (!(alpha > 0.0 && alpha < beta && beta < 1.0)) {
    throw DomainError(std::string(fn) + ": require 0 < alpha < beta < 1");
  }
}

}  // namespace

// --- mean IRF ------------------------------------------------------------------

MeanIrf::MeanIrf(const ModelSpec& model, std::size_t excluded_item)
    : model_(&model), excluded_(excluded_item) {
  if (model.size() < 2) throw ValidationError("mean IRF needs at least 2 items");
  if (excluded_item >= model.size()) {
    throw ValidationError("excluded item out of range", static_cast<long>(excluded_item));
  }
  KahanSum lo;
  KahanSum hi;
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (j == excluded_) continue;
    lo.add(model.item(j).kappa());
    hi.add(model.item(j).gamma());
  }
  const double others = static_cast<double>(model.size() - 1);
  lower_ = lo.value() / others;
  upper_ = hi.value() / others;
}

double MeanIrf::value(double theta) const {
  require_theta(theta, "mean_irf");
  const ModelSpec& m = *model_;
  if (m.is_homogeneous()) return m.item(0).eval(theta);
  KahanSum sum;
  if (m.shares_trait()) {
    const double lambda = m.item(0).latent_coordinate(theta);
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j != excluded_) sum.add(m.item(j).eval_latent(lambda));
    }
  } else {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j != excluded_) sum.add(m.item(j).eval(theta));
    }
  }
  return sum.value() / static_cast<double>(m.size() - 1);
}

double MeanIrf::slope(double theta) const {
  require_theta(theta, "mean_irf");
  const ModelSpec& m = *model_;
  if (m.is_homogeneous()) return m.item(0).deriv(theta);
  KahanSum sum;
  if (m.shares_trait()) {
    const double lambda = m.item(0).latent_coordinate(theta);
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j != excluded_) sum.add(m.item(j).deriv_latent(lambda));
    }
  } else {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j != excluded_) sum.add(m.item(j).deriv(theta));
    }
  }
  return sum.value() / static_cast<double>(m.size() - 1);
}

double MeanIrf::invert(double target, double lo, double hi) const {
  if (!(target > lower_ && target < upper_)) {
    throw NoSolutionError("target " + std::to_string(target) +
                          " is outside the attainable range of the mean IRF");
  }
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw DomainError("invert_mean_irf: bracket must satisfy 0 < lo < hi < 1");
  }
  double f_lo = value(lo) - target;
  double f_hi = value(hi) - target;
  if (std::fabs(f_lo) <= kInvertTolerance) return lo;
  if (std::fabs(f_hi) <= kInvertTolerance) return hi;
  if (f_lo > 0.0 || f_hi < 0.0) {
    throw NoSolutionError("target " + std::to_string(target) + " is not bracketed by [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  double x = lo - f_lo * (hi - lo) / (f_hi - f_lo);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = value(x) - target;
    if (std::fabs(f) <= kInvertTolerance) return x;
    if (f < 0.0) {
      lo = x;
      f_lo = f;
    } else {
      hi = x;
      f_hi = f;
    }
    if (std::nextafter(lo, hi) >= hi) return -f_lo <= f_hi ? lo : hi;
    const double d = slope(x);
    double next = d > 0.0 && std::isfinite(d) ? x - f / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

double mean_irf(const ModelSpec& model, std::size_t excluded_item, double theta) {
  return MeanIrf(model, excluded_item).value(theta);
}

double invert_mean_irf(const ModelSpec& model, std::size_t excluded_item, double target) {
  return MeanIrf(model, excluded_item).invert(target);
}

// --- oracle recovery -----------------------------------------------------------

double RecoveryGrid::interpolate(double theta) const {
  if (entries.empty()) throw EmptyGridError("recovery grid empty");
  if (theta <= entries.front().theta_k) return entries.front().p_hat;
  if (theta >= entries.back().theta_k) return entries.back().p_hat;
  const auto upper = std::upper_bound(
      entries.begin(), entries.end(), theta,
      [](double t, const RecoveryKnot& knot) { return t < knot.theta_k; });
  const RecoveryKnot& right = *upper;
  const RecoveryKnot& left = *(upper - 1);
  const double w = (theta - left.theta_k) / (right.theta_k - left.theta_k);
  return left.p_hat + w * (right.p_hat - left.p_hat);
}

namespace {

// θ_k for every admissible k, bracketed on a uniform θ grid over [alpha, beta]
// before the Newton polish.
RecoveryGrid build_grid(const MeanIrf& mean, const RestScoreTable& table,
                        std::size_t n, double alpha, double beta) {
  RecoveryGrid grid;
  grid.item = table.excluded_item;
  grid.alpha = alpha;
  grid.beta = beta;

  std::vector<double> thetas(kBracketGrid);
  std::vector<double> values(kBracketGrid);
  for (std::size_t j = 0; j < kBracketGrid; ++j) {
    thetas[j] = j + 1 == kBracketGrid
                    ? beta
                    : alpha + (beta - alpha) * static_cast<double>(j) / (kBracketGrid - 1);
    values[j] = mean.value(thetas[j]);
  }

  const double others = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = static_cast<double>(k) / others;
    if (!(target > values.front() && target < values.back())) continue;
    if (!table.cond_item[k]) continue;
    const auto it = std::lower_bound(values.begin(), values.end(), target);
    const std::size_t j = static_cast<std::size_t>(it - values.begin());
    double theta_k = 0.0;
    try {
      theta_k = mean.invert(target, thetas[j - 1], thetas[j]);
    } catch (const NoSolutionError&) {
      theta_k = mean.invert(target, alpha, beta);
    }
    if (!(theta_k > alpha && theta_k < beta)) continue;
    grid.entries.push_back({k, theta_k, *table.cond_item[k]});
  }
  if (grid.entries.empty()) {
    throw EmptyGridError("recovery grid empty: no theta_k in (" + std::to_string(alpha) + ", " +
                         std::to_string(beta) + ") for item " +
                         std::to_string(table.excluded_item + 1) + " at n = " +
                         std::to_string(n));
  }
  return grid;
}

}  // namespace

RecoveryGrid recovery_grid_from_table(const ModelSpec& model, const RestScoreTable& table,
                                      double alpha, double beta) {
  require_interval(alpha, beta, "recover_irf");
  if (table.pmf.size() != model.size()) {
    throw ValidationError("rest-score table does not match the model size");
  }
  const MeanIrf mean(model, table.excluded_item);
  return build_grid(mean, table, model.size(), alpha, beta);
}

RecoveryGrid recover_irf_oracle(const ModelSpec& model, std::size_t item, double alpha,
                                double beta, const QuadratureOptions& quadrature) {
  require_interval(alpha, beta, "recover_irf_oracle");
  RestScoreOptions options;
  options.quadrature = quadrature;
  const RestScoreTable table = rest_score_table(model, item, options);
  return recovery_grid_from_table(model, table, alpha, beta);
}

std::vector<RecoveryGrid> recover_all_oracle(const ModelSpec& model, double alpha, double beta,
                                             const QuadratureOptions& quadrature) {
  require_interval(alpha, beta, "recover_all_oracle");
  RestScoreOptions options;
  options.quadrature = quadrature;
  const std::size_t n = model.size();
  if (model.is_homogeneous()) {
    const RestScoreTable table = rest_score_table(model, 0, options);
    const RecoveryGrid first = recovery_grid_from_table(model, table, alpha, beta);
    std::vector<RecoveryGrid> out(n, first);
    for (std::size_t i = 0; i < n; ++i) out[i].item = i;
    return out;
  }
  const std::vector<RestScoreTable> tables = rest_score_tables(model, options);
  std::vector<RecoveryGrid> out(n);
  parallel_for(n, [&](std::size_t i) {
    out[i] = recovery_grid_from_table(model, tables[i], alpha, beta);
  });
  return out;
}

// --- empirical regressogram ------------------------------------------------------

RecoveryGrid Regressogram::as_grid() const {
  RecoveryGrid grid;
  grid.item = item;
  for (const auto& bin : bins) grid.entries.push_back({bin.score_lo, bin.theta, bin.p_hat});
  if (!bins.empty()) {
    grid.alpha = bins.front().theta;
    grid.beta = bins.back().theta;
  }
  return grid;
}

Regressogram recover_irf_empirical(const ResponseMatrix& responses, std::size_t item,
                                   std::size_t min_bin_size) {
  const std::size_t rows = responses.rows();
  const std::size_t n = responses.cols();
  if (rows < kMinEmpiricalRespondents) {
    throw ValidationError("empirical recovery needs at least " +
                          std::to_string(kMinEmpiricalRespondents) + " respondents");
  }
  if (n < 2) throw ValidationError("empirical recovery needs at least 2 items");
  if (item >= n) throw ValidationError("item out of range", static_cast<long>(item));
  if (min_bin_size == 0) throw ValidationError("min_bin_size must be positive");

  std::vector<std::size_t> count(n, 0);
  std::vector<std::size_t> correct(n, 0);
  std::size_t total_correct = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = responses.row(r);
    std::size_t score = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] > 1) {
        throw ValidationError("responses must be 0 or 1 (row " + std::to_string(r + 1) + ")");
      }
      if (j != item) score += row[j];
    }
    ++count[score];
    correct[score] += row[item];
    total_correct += row[item];
  }
  if (total_correct == 0 || total_correct == rows) {
    throw DegenerateError("item " + std::to_string(item + 1) + ": constant response column");
  }

  Regressogram out;
  out.item = item;
  const double total = static_cast<double>(rows);
  std::vector<std::size_t> ones;  // correct responses per closed bin
  std::size_t rank = 0;           // respondents with a rest score below the open bin
  RegressogramBin open;
  std::size_t open_ones = 0;
  bool has_open = false;
  auto finish = [&](RegressogramBin& bin, std::size_t bin_ones, std::size_t start) {
    bin.p_hat = static_cast<double>(bin_ones) / static_cast<double>(bin.count);
    bin.theta = (static_cast<double>(start) + 0.5 * static_cast<double>(bin.count)) / total;
  };
  std::size_t open_start = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (count[s] == 0) continue;
    if (!has_open) {
      open = RegressogramBin{};
      open.score_lo = s;
      open_ones = 0;
      open_start = rank;
      has_open = true;
    }
    open.score_hi = s;
    open.count += count[s];
    open_ones += correct[s];
    rank += count[s];
    if (open.count >= min_bin_size) {
      finish(open, open_ones, open_start);
      out.bins.push_back(open);
      ones.push_back(open_ones);
      has_open = false;
    }
  }
  if (has_open) {
    if (out.bins.empty()) {
      finish(open, open_ones, open_start);
      out.bins.push_back(open);
    } else {
      // A short trailing remainder joins the last bin.
      RegressogramBin& last = out.bins.back();
      const std::size_t start = open_start - last.count;
      last.score_hi = open.score_hi;
      last.count += open.count;
      finish(last, ones.back() + open_ones, start);
    }
  }
  return out;
}

EmpiricalRecovery recover_all_empirical(const ResponseMatrix& responses,
                                        std::size_t min_bin_size) {
  EmpiricalRecovery out;
  for (std::size_t i = 0; i < responses.cols(); ++i) {
    try {
      out.items.push_back(recover_irf_empirical(responses, i, min_bin_size));
    } catch (const DegenerateError& e) {
      out.warnings.push_back(std::string(e.what()) + "; skipped");
    }
  }
  return out;
}

// --- sup differences -------------------------------------------------------------

namespace {

std::vector<double> comparison_grid(double alpha, double beta, std::size_t grid) {
  if (!(alpha >= 0.0 && alpha < beta && beta <= 1.0)) {
    throw DomainError("sup_diff: require 0 <= alpha < beta <= 1");
  }
  if (grid < 2) throw DomainError("sup_diff: grid needs at least 2 points");
  std::vector<double> thetas(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    double t = j + 1 == grid ? beta : alpha + (beta - alpha) * static_cast<double>(j) / (grid - 1);
    thetas[j] = std::clamp(t, kOpenEdge, 1.0 - kOpenEdge);
  }
  return thetas;
}

template <typename Diff>
SupDiffReport sup_report(std::size_t items, double alpha, double beta, std::size_t grid,
                         Diff diff) {
  const std::vector<double> thetas = comparison_grid(alpha, beta, grid);
  SupDiffReport out;
  out.alpha = alpha;
  out.beta = beta;
  out.grid = grid;
  out.per_item.assign(items, 0.0);
  parallel_for(items, [&](std::size_t i) {
    double worst = 0.0;
    for (double t : thetas) worst = std::max(worst, std::fabs(diff(i, t)));
    out.per_item[i] = worst;
  });
  for (double v : out.per_item) out.max_over_items = std::max(out.max_over_items, v);
  return out;
}

void require_same_count(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ValidationError("sup_diff: item counts differ (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

}  // namespace

SupDiffReport sup_diff(const ModelSpec& a, const ModelSpec& b, double alpha, double beta,
                       std::size_t grid) {
  require_same_count(a.size(), b.size());
  return sup_report(a.size(), alpha, beta, grid, [&](std::size_t i, double t) {
    return a.item(i).eval(t) - b.item(i).eval(t);
  });
}

SupDiffReport sup_diff(std::span<const RecoveryGrid> recovered, const ModelSpec& truth,
                       double alpha, double beta, std::size_t grid) {
  require_same_count(recovered.size(), truth.size());
  for (const auto& g : recovered) {
    if (g.item >= truth.size()) throw ValidationError("sup_diff: grid item out of range");
    if (g.entries.empty()) throw EmptyGridError("sup_diff: recovery grid empty");
  }
  return sup_report(recovered.size(), alpha, beta, grid, [&](std::size_t i, double t) {
    return recovered[i].interpolate(t) - truth.item(recovered[i].item).eval(t);
  });
}

SupDiffReport sup_diff(std::span<const RecoveryGrid> a, std::span<const RecoveryGrid> b,
                       double alpha, double beta, std::size_t grid) {
  require_same_count(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].entries.empty() || b[i].entries.empty()) {
      throw EmptyGridError("sup_diff: recovery grid empty");
    }
  }
  return sup_report(a.size(), alpha, beta, grid, [&](std::size_t i, double t) {
    return a[i].interpolate(t) - b[i].interpolate(t);
  });
}

}  // namespace irtid
