#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irtid/manifest.hpp"
#include "irtid/recovery.hpp"
#include "irtid/responses.hpp"

namespace irtid {

// --- simulation ------------------------------------------------------------------

struct SimConfig {
  std::uint64_t seed = 0;
  std::size_t num_respondents = 0;
  ModelSpec model;
};

/// Respondent r draws from Philox stream r: θ ~ U(0,1) first, then one
/// uniform per item, Y_j = [u_j < P_j(θ)]. Output is bit-identical for a
/// fixed seed regardless of the worker count.
ResponseMatrix simulate_responses(const SimConfig& config);

// --- model families ----------------------------------------------------------------

/// A rule producing a model of any requested size.
struct FamilySampler {
  std::string name;
  std::function<ModelSpec(std::size_t n)> make;
};

inline constexpr std::uint64_t kDefaultPresetSeed = 20240917;

FamilySampler homogeneous_identity_sampler();
/// Every item is the normal ogive with a = 1, b = 1.
FamilySampler homogeneous_normal_ogive_sampler();
/// Item j draws a ∈ [0.5, 2], b ∈ [−1.5, 1.5], c ∈ [0, 0.25], d ∈ [0.75, 1]
/// uniformly from Philox stream j, so the model of size n is a prefix of the
/// model of size n + 1.
FamilySampler heterogeneous_4pl_sampler(std::uint64_t seed = kDefaultPresetSeed);

std::vector<std::string> preset_names();
std::optional<FamilySampler> find_preset(std::string_view name,
                                         std::uint64_t seed = kDefaultPresetSeed);

// --- convergence ----------------------------------------------------------------------

struct ConvergenceReport {
  std::string family;
  std::vector<std::size_t> n_grid;  // sizes that produced an error
  std::vector<double> errors;       // max_i sup_{(α,β)} |P̂_i − P_i|
  double slope = 0.0;               // least-squares slope of log error on log n
  double alpha = 0.0;
  double beta = 1.0;
  std::vector<std::size_t> skipped;
  std::vector<std::string> skip_reasons;

  /// Last error below the first one (needs at least two sizes).
  bool decreasing_end_to_end() const;
};

/// Oracle recovery of every item against the truth, for each n.
ConvergenceReport convergence_experiment(const FamilySampler& sampler,
                                         const std::vector<std::size_t>& n_grid, double alpha,
                                         double beta, std::size_t sup_grid = kDefaultSupGrid);

/// Max-over-items sup difference between the oracle recoveries of two families
/// at each n. Identical manifests give identical recoveries.
ConvergenceReport cross_recovery_experiment(const FamilySampler& first,
                                            const FamilySampler& second,
                                            const std::vector<std::size_t>& n_grid, double alpha,
                                            double beta, std::size_t sup_grid = kDefaultSupGrid);

/// Least-squares slope of log(y) on log(x) over points with x, y > 0; NaN with
/// fewer than two such points.
double log_log_slope(const std::vector<std::size_t>& x, const std::vector<double>& y);

// --- bound checks ------------------------------------------------------------------------

struct LemmaCheckConfig {
  double delta = 0.05;  // I_δ = (δ, 1 − δ)
  double eta = 0.25;    // window half-width n^{−η} around θ_k
  double alpha = 0.1;
  double beta = 0.9;
  std::vector<std::size_t> n_grid{11, 21, 41, 81, 161};
  double m = 0.1;          // Hoeffding radius
  std::size_t min_n = 5;   // smaller n are reported but not judged

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct BoundCheckReport {
  std::size_t n = 0;
  std::size_t k = 0;
  double lhs = 0.0;  // measured quantity
  double rhs = 0.0;  // bound or reference
  /// Allowance added to rhs for upper bounds with Monte Carlo noise.
  double tolerance = 0.0;
  bool lower_bound = false;
  bool pass = false;
  double c_tilde_estimate = 0.0;
  bool excluded = false;
};

/// True when every non-excluded report passes.
bool all_pass(const std::vector<BoundCheckReport>& reports);

/// n·P(E_{n,k}) with k = round(k_ratio·(n − 1)), excluding item 1. Each report
/// is a lower-bound check against half the value at the smallest judged n;
/// c_tilde_estimate is the running minimum. Throws NoSolutionError when θ_k
/// is outside (alpha, beta) for a judged n.
std::vector<BoundCheckReport> check_lemma1(const FamilySampler& sampler, double k_ratio,
                                           const LemmaCheckConfig& config);

/// 1 − P(Θ ∈ I_δ | E_{n,k}). Judged as an upper bound against the previous
/// judged value decayed by exp(−kMinTailDecay·Δn), i.e. the log tail mass
/// must fall with slope at most −kMinTailDecay; c_tilde_estimate is the
/// observed decay rate −Δlog/Δn.
std::vector<BoundCheckReport> check_lemma2(const FamilySampler& sampler, double k_ratio,
                                           const LemmaCheckConfig& config);

inline constexpr double kMinTailDecay = 1e-3;

/// Monte Carlo estimate of P(|Ȳ_{−i} − P̄_{−i}(θ)| > m | Θ = θ) against
/// 2·exp(−2(n − 1)m²), with tolerance three binomial standard errors.
BoundCheckReport check_hoeffding(const ModelSpec& model, std::size_t excluded, double theta,
                                 double m, std::size_t trials, std::uint64_t seed);

inline constexpr std::size_t kMinNormalApproxItems = 10;

/// Gap between the exact conditional PMF at k and its continuity-corrected
/// Gaussian surrogate. rhs is 1/σ², i.e. the bound with c = 1, and
/// c_tilde_estimate is gap·σ². Rest scores over fewer than
/// kMinNormalApproxItems items are reported as excluded.
BoundCheckReport check_normal_approx(const ModelSpec& model, std::size_t excluded, double theta,
                                     std::size_t k);

}  // namespace irtid
