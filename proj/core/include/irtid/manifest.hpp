#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irtid/irf.hpp"
#include "irtid/quadrature.hpp"

namespace irtid {

/// n IRFs on a U(0,1) latent trait. Items with other trait distributions must
/// be reparameterized first (transform_irf).
class ModelSpec {
 public:
  /// Throws ValidationError (carrying the item index) for flat items (a = 0)
  /// or items with κ ≥ γ.
  explicit ModelSpec(std::vector<Irf> items);

  static ModelSpec from_params(std::span<const ItemParams> params);
  /// n copies of one IRF. Copies share their representation, which lets
  /// per-item computations be done once.
  static ModelSpec homogeneous(const Irf& irf, std::size_t n);

  std::size_t size() const { return items_.size(); }
  const Irf& item(std::size_t i) const { return items_.at(i); }
  std::span<const Irf> items() const { return items_; }
  /// True when every item shares one IRF representation.
  bool is_homogeneous() const { return homogeneous_; }
  /// True when every item uses the same trait distribution, so one latent
  /// coordinate per θ serves all items.
  bool shares_trait() const { return shared_trait_; }

  /// Item IRF values at each θ node: row q holds P_1(θ_q), ..., P_n(θ_q).
  std::vector<std::vector<double>> values_at(std::span<const double> thetas) const;

 private:
  std::vector<Irf> items_;
  bool homogeneous_ = false;
  bool shared_trait_ = false;
};

/// A nonempty set of distinct 0-based item indices.
struct PatternQuery {
  std::vector<std::size_t> indices;
};

/// P(Y_{i1} = 1, ..., Y_{ik} = 1) = ∫ ∏ P_{ij}(θ) dθ.
/// Throws QuadratureError when the embedded error estimate exceeds the rule's
/// tolerance.
double joint_prob(const ModelSpec& model, const PatternQuery& query,
                  const UnitQuadrature& quad = default_quadrature());

inline constexpr std::size_t kMaxFullManifestItems = 20;

/// Probabilities of all 2ⁿ response patterns. Pattern index bits are ordered
/// with item 1 as the most significant bit, so index order matches the
/// lexicographic order of the strings "y1 y2 ... yn".
struct ManifestTable {
  std::size_t n = 0;
  std::vector<double> probs;

  std::string pattern(std::size_t index) const;
  double prob(std::string_view pattern) const;
  /// P(Y_i = 1) by summing the table.
  double marginal(std::size_t item) const;
};

ManifestTable full_manifest(const ModelSpec& model,
                            const UnitQuadrature& quad = default_quadrature());

/// Exact PMF of a sum of independent Bernoulli(p_j) by the O(n²) convolution
/// recurrence; entry k is P(S = k).
std::vector<double> poisson_binomial_pmf(std::span<const double> probs);

struct PoissonBinomialMoments {
  double mu = 0.0;      // Σ p_j
  double sigma2 = 0.0;  // Σ p_j (1 − p_j)
};
PoissonBinomialMoments poisson_binomial_moments(std::span<const double> probs);

/// Pmfs below this are treated as zero and their conditionals left undefined.
inline constexpr double kNegligiblePmf = 1e-300;

/// Distribution of the rest score S_{-i} = Σ_{j≠i} Y_j and conditionals given
/// the events E_k = {S_{-i} = k}, k = 0..n−1.
struct RestScoreTable {
  std::size_t excluded_item = 0;
  std::vector<double> pmf;                             // P(E_k)
  std::vector<double> joint_item;                      // P(Y_i = 1, E_k)
  std::vector<std::optional<double>> cond_item;        // P(Y_i = 1 | E_k)
  std::optional<double> delta;
  std::vector<std::optional<double>> cond_trait_tail;  // P(Θ ∈ (δ, 1−δ) | E_k)
  /// P(Θ ∉ (δ, 1−δ) | E_k), integrated directly rather than as a complement
  /// so that tiny tail masses keep their relative precision.
  std::vector<std::optional<double>> cond_trait_outside;
};

struct RestScoreOptions {
  std::optional<double> delta;
  QuadratureOptions quadrature{};
};

/// Single-item table: exact Poisson-binomial DP over the other n − 1 items at
/// every quadrature node.
RestScoreTable rest_score_table(const ModelSpec& model, std::size_t excluded_item,
                                const RestScoreOptions& options = {});

/// Tables for every item at once. Leave-one-out Poisson-binomial PMFs come
/// from a divide-and-conquer product tree, O(n² log n) per node instead of
/// O(n³).
std::vector<RestScoreTable> rest_score_tables(const ModelSpec& model,
                                              const RestScoreOptions& options = {});

}  // namespace irtid
