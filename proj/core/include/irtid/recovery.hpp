#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "irtid/manifest.hpp"
#include "irtid/responses.hpp"

namespace irtid {

/// Mean IRF of all items except one: P̄_{-i}(θ) = Σ_{j≠i} P_j(θ) / (n − 1).
class MeanIrf {
 public:
  MeanIrf(const ModelSpec& model, std::size_t excluded_item);

  double value(double theta) const;
  double slope(double theta) const;
  /// lim_{θ↓0} and lim_{θ↑1}: the means of the other items' asymptotes.
  double lower_limit() const { return lower_; }
  double upper_limit() const { return upper_; }

  /// Solves P̄(θ) = target to |P̄(θ) − target| ≤ 1e-12, or to the spacing of
  /// doubles near the root when P̄ is steeper than that allows, by safeguarded Newton
  /// inside [lo, hi] (default [1e-10, 1 − 1e-10]). Throws NoSolutionError when
  /// the target is outside the attainable open range or the bracket.
  double invert(double target, double lo = kBracketLow, double hi = kBracketHigh) const;

  static constexpr double kBracketLow = 1e-10;
  static constexpr double kBracketHigh = 1.0 - 1e-10;

 private:
  const ModelSpec* model_;
  std::size_t excluded_;
  double lower_ = 0.0;
  double upper_ = 1.0;
};

double mean_irf(const ModelSpec& model, std::size_t excluded_item, double theta);
double invert_mean_irf(const ModelSpec& model, std::size_t excluded_item, double target);

struct RecoveryKnot {
  std::size_t k = 0;
  double theta_k = 0.0;
  double p_hat = 0.0;
};

/// Recovered values of one item at the knots θ_k, where P̄_{-i}(θ_k) = k/(n−1).
struct RecoveryGrid {
  std::size_t item = 0;
  std::vector<RecoveryKnot> entries;
  double alpha = 0.0;
  double beta = 1.0;

  /// Linear interpolation between knots; the nearest knot's value outside the
  /// knot span.
  double interpolate(double theta) const;
};

/// Builds the knot grid for `table.excluded_item` from manifest-level data
/// only: θ_k from the other items' mean IRF, p̂ = P(Y_i = 1 | S_{-i} = k).
/// Throws EmptyGridError when no θ_k falls in (alpha, beta).
RecoveryGrid recovery_grid_from_table(const ModelSpec& model, const RestScoreTable& table,
                                      double alpha, double beta);

RecoveryGrid recover_irf_oracle(const ModelSpec& model, std::size_t item, double alpha,
                                double beta, const QuadratureOptions& quadrature = {});

/// Oracle recovery for every item, sharing the rest-score work.
std::vector<RecoveryGrid> recover_all_oracle(const ModelSpec& model, double alpha, double beta,
                                             const QuadratureOptions& quadrature = {});

struct RegressogramBin {
  std::size_t score_lo = 0;  // inclusive rest-score range of the merged bin
  std::size_t score_hi = 0;
  double theta = 0.0;        // midpoint of the bin's empirical rank interval
  double p_hat = 0.0;        // proportion correct
  std::size_t count = 0;
};

struct Regressogram {
  std::size_t item = 0;
  std::vector<RegressogramBin> bins;

  RecoveryGrid as_grid() const;
};

inline constexpr std::size_t kMinEmpiricalRespondents = 100;
inline constexpr std::size_t kDefaultMinBinSize = 25;

/// Finite-sample analogue of the oracle recovery: respondents grouped by rest
/// score, adjacent groups merged until each has at least `min_bin_size`
/// respondents. Throws DegenerateError for a constant response column.
Regressogram recover_irf_empirical(const ResponseMatrix& responses, std::size_t item,
                                   std::size_t min_bin_size = kDefaultMinBinSize);

struct EmpiricalRecovery {
  std::vector<Regressogram> items;  // skipped items are absent
  std::vector<std::string> warnings;
};

EmpiricalRecovery recover_all_empirical(const ResponseMatrix& responses,
                                        std::size_t min_bin_size = kDefaultMinBinSize);

struct SupDiffReport {
  std::vector<double> per_item;
  double max_over_items = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
  std::size_t grid = 0;
};

inline constexpr std::size_t kDefaultSupGrid = 401;

/// max_i sup_θ |P_i(θ) − P*_i(θ)| over `grid` equally spaced points of
/// [alpha, beta] (endpoints included).
SupDiffReport sup_diff(const ModelSpec& a, const ModelSpec& b, double alpha, double beta,
                       std::size_t grid = kDefaultSupGrid);
SupDiffReport sup_diff(std::span<const RecoveryGrid> recovered, const ModelSpec& truth,
                       double alpha, double beta, std::size_t grid = kDefaultSupGrid);
SupDiffReport sup_diff(std::span<const RecoveryGrid> a, std::span<const RecoveryGrid> b,
                       double alpha, double beta, std::size_t grid = kDefaultSupGrid);

}  // namespace irtid
