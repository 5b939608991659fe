#include "irtid/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "irtid/errors.hpp"
#include "irtid/parallel.hpp"

namespace irtid {

// --- ModelSpec ---------------------------------------------------------------

ModelSpec::ModelSpec(std::vector<Irf> items) : items_(std::move(items)) {
  if (items_.empty()) {
    throw ValidationError("model must contain at least one item");
  }
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const Irf& irf = items_[i];
    if (const auto& p = irf.params(); p && p->a == 0.0) {
      throw ValidationError("item " + std::to_string(i + 1) +
                                ": a = 0 gives a flat IRF (derivative lower bound fails)",
                            static_cast<long>(i));
    }
    if (!(irf.kappa() < irf.gamma())) {
      throw ValidationError("item " + std::to_string(i + 1) + ": asymptotes need kappa < gamma",
                            static_cast<long>(i));
    }
  }
  homogeneous_ = std::all_of(items_.begin(), items_.end(), [&](const Irf& irf) {
    return irf.shares_representation(items_.front());
  });
  shared_trait_ = std::all_of(items_.begin(), items_.end(), [&](const Irf& irf) {
    return !irf.trait().name.empty() && irf.trait().name == items_.front().trait().name;
  });
}

ModelSpec ModelSpec::from_params(std::span<const ItemParams> params) {
  std::vector<Irf> items;
  items.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    try {
      items.push_back(Irf::from_params(params[i]));
    } catch (const ValidationError& e) {
      throw ValidationError("item " + std::to_string(i + 1) + ": " + e.what(),
                            static_cast<long>(i));
    }
  }
  return ModelSpec(std::move(items));
}

ModelSpec ModelSpec::homogeneous(const Irf& irf, std::size_t n) {
  return ModelSpec(std::vector<Irf>(n, irf));
}

std::vector<std::vector<double>> ModelSpec::values_at(std::span<const double> thetas) const {
  std::vector<std::vector<double>> out(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t q) {
    auto& row = out[q];
    row.resize(items_.size());
    if (homogeneous_) {
      std::fill(row.begin(), row.end(), items_.front().eval(thetas[q]));
      return;
    }
    if (shared_trait_) {
      const double lambda = items_.front().latent_coordinate(thetas[q]);
      for (std::size_t j = 0; j < items_.size(); ++j) row[j] = items_[j].eval_latent(lambda);
      return;
    }
    for (std::size_t j = 0; j < items_.size(); ++j) row[j] = items_[j].eval(thetas[q]);
  });
  return out;
}

// --- manifest probabilities ----------------------------------------------------

double joint_prob(const ModelSpec& model, const PatternQuery& query, const UnitQuadrature& quad) {
  if (query.indices.empty()) {
    throw ValidationError("pattern query must be nonempty");
  }
  std::vector<std::size_t> sorted = query.indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("pattern query indices must be distinct");
  }
  if (sorted.back() >= model.size()) {
    throw ValidationError("pattern query index out of range",
                          static_cast<long>(sorted.back()));
  }
  return quad.integrate_checked([&](double theta) {
    double prod = 1.0;
    for (std::size_t i : query.indices) prod *= model.item(i).eval(theta);
    return prod;
  });
}

std::string ManifestTable::pattern(std::size_t index) const {
  std::string s(n, '0');
  for (std::size_t j = 0; j < n; ++j) {
    if ((index >> (n - 1 - j)) & 1U) s[j] = '1';
  }
  return s;
}

double ManifestTable::prob(std::string_view pattern) const {
  if (pattern.size() != n) throw ValidationError("pattern length does not match item count");
  std::size_t index = 0;
  for (char ch : pattern) {
    if (ch != '0' && ch != '1') throw ValidationError("pattern must contain only 0/1");
    index = (index << 1U) | static_cast<std::size_t>(ch == '1');
  }
  return probs[index];
}

double ManifestTable::marginal(std::size_t item) const {
  if (item >= n) throw ValidationError("item index out of range");
  KahanSum sum;
  const std::size_t bit = n - 1 - item;
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    if ((idx >> bit) & 1U) sum.add(probs[idx]);
  }
  return sum.value();
}

ManifestTable full_manifest(const ModelSpec& model, const UnitQuadrature& quad) {
  const std::size_t n = model.size();
  if (n > kMaxFullManifestItems) {
    throw ValidationError("full_manifest refuses n > " + std::to_string(kMaxFullManifestItems) +
                          " (2^n patterns)");
  }
  const std::size_t patterns = std::size_t{1} << n;
  const auto values = model.values_at(quad.nodes());
  std::vector<KahanSum> acc(patterns);
  std::vector<double> cur(patterns);
  std::vector<double> next(patterns);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    cur[0] = 1.0;
    std::size_t len = 1;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = values[q][j];
      for (std::size_t idx = 0; idx < len; ++idx) {
        next[2 * idx] = cur[idx] * (1.0 - p);
        next[2 * idx + 1] = cur[idx] * p;
      }
      len *= 2;
      std::swap(cur, next);
    }
    const double w = quad.weights()[q];
    for (std::size_t idx = 0; idx < patterns; ++idx) acc[idx].add(w * cur[idx]);
  }
  ManifestTable table;
  table.n = n;
  table.probs.resize(patterns);
  for (std::size_t idx = 0; idx < patterns; ++idx) table.probs[idx] = acc[idx].value();
  return table;
}

// --- Poisson-binomial ----------------------------------------------------------

namespace {

void check_probs(std::span<const double> probs) {
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("Poisson-binomial probabilities must lie in [0,1]");
    }
  }
}

// Unchecked DP into a caller-provided buffer of size probs.size() + 1.
void pb_into(std::span<const double> probs, std::vector<double>& out) {
  out.assign(probs.size() + 1, 0.0);
  out[0] = 1.0;
  std::size_t len = 1;
  for (double p : probs) {
    const double q = 1.0 - p;
    out[len] = out[len - 1] * p;
    for (std::size_t k = len - 1; k > 0; --k) out[k] = out[k] * q + out[k - 1] * p;
    out[0] *= q;
    ++len;
  }
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Calls emit(i, pmf_without_i) for every i in [lo, hi). `outside` is the PMF
// of all items outside [lo, hi).
template <typename Emit>
void leave_one_out(std::span<const double> probs, std::size_t lo, std::size_t hi,
                   const std::vector<double>& outside, Emit& emit) {
  if (hi - lo == 1) {
    emit(lo, outside);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> left;
  std::vector<double> right;
  pb_into(probs.subspan(lo, mid - lo), left);
  pb_into(probs.subspan(mid, hi - mid), right);
  leave_one_out(probs, lo, mid, convolve(outside, right), emit);
  leave_one_out(probs, mid, hi, convolve(outside, left), emit);
}

struct TableAccumulator {
  std::vector<KahanSum> pmf;
  std::vector<KahanSum> joint;
  std::vector<KahanSum> outside;

  explicit TableAccumulator(std::size_t size) : pmf(size), joint(size), outside(size) {}

  void add(const std::vector<double>& rest, double weight, double p_item, bool in_tail) {
    for (std::size_t k = 0; k < rest.size(); ++k) {
      const double wk = weight * rest[k];
      pmf[k].add(wk);
      joint[k].add(wk * p_item);
      if (in_tail) outside[k].add(wk);
    }
  }

  RestScoreTable finish(std::size_t item, std::optional<double> delta) const {
    RestScoreTable t;
    t.excluded_item = item;
    t.delta = delta;
    const std::size_t size = pmf.size();
    t.pmf.resize(size);
    t.joint_item.resize(size);
    t.cond_item.resize(size);
    if (delta) {
      t.cond_trait_tail.resize(size);
      t.cond_trait_outside.resize(size);
    }
    for (std::size_t k = 0; k < size; ++k) {
      t.pmf[k] = pmf[k].value();
      t.joint_item[k] = joint[k].value();
      if (t.pmf[k] < kNegligiblePmf) continue;
      t.cond_item[k] = std::clamp(t.joint_item[k] / t.pmf[k], 0.0, 1.0);
      if (delta) {
        const double out = std::clamp(outside[k].value() / t.pmf[k], 0.0, 1.0);
        t.cond_trait_outside[k] = out;
        t.cond_trait_tail[k] = 1.0 - out;
      }
    }
    return t;
  }
};

UnitQuadrature rest_quadrature(const RestScoreOptions& options) {
  QuadratureOptions q = options.quadrature;
  if (options.delta) {
    const double d = *options.delta;
    if (!(d > 0.0 && d < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
    q.breakpoints.push_back(d);
    q.breakpoints.push_back(1.0 - d);
  }
  return UnitQuadrature(std::move(q));
}

bool in_tail(double theta, std::optional<double> delta) {
  return delta && (theta <= *delta || theta >= 1.0 - *delta);
}

}  // namespace

std::vector<double> poisson_binomial_pmf(std::span<const double> probs) {
  if (probs.empty()) throw DomainError("poisson_binomial_pmf: need at least one probability");
  check_probs(probs);
  std::vector<double> out;
  pb_into(probs, out);
  return out;
}

PoissonBinomialMoments poisson_binomial_moments(std::span<const double> probs) {
  check_probs(probs);
  KahanSum mu;
  KahanSum var;
  for (double p : probs) {
    mu.add(p);
    var.add(p * (1.0 - p));
  }
  return {mu.value(), var.value()};
}

RestScoreTable rest_score_table(const ModelSpec& model, std::size_t excluded_item,
                                const RestScoreOptions& options) {
  const std::size_t n = model.size();
  if (n < 2) throw ValidationError("rest_score_table requires at least 2 items");
  if (excluded_item >= n) {
    throw ValidationError("excluded item out of range", static_cast<long>(excluded_item));
  }
  const UnitQuadrature quad = rest_quadrature(options);
  const auto values = model.values_at(quad.nodes());

  // Per-node PMFs are computed independently, then reduced in node order.
  std::vector<std::vector<double>> rest(quad.size());
  parallel_for(quad.size(), [&](std::size_t q) {
    std::vector<double> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != excluded_item) others.push_back(values[q][j]);
    }
    pb_into(others, rest[q]);
  });

  TableAccumulator acc(n);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    acc.add(rest[q], quad.weights()[q], values[q][excluded_item],
            in_tail(quad.nodes()[q], options.delta));
  }
  return acc.finish(excluded_item, options.delta);
}

std::vector<RestScoreTable> rest_score_tables(const ModelSpec& model,
                                              const RestScoreOptions& options) {
  const std::size_t n = model.size();
  if (n < 2) throw ValidationError("rest_score_tables requires at least 2 items");
  if (model.is_homogeneous()) {
    RestScoreTable first = rest_score_table(model, 0, options);
    std::vector<RestScoreTable> out(n, first);
    for (std::size_t i = 0; i < n; ++i) out[i].excluded_item = i;
    return out;
  }

  const UnitQuadrature quad = rest_quadrature(options);
  const auto values = model.values_at(quad.nodes());
  std::vector<TableAccumulator> acc(n, TableAccumulator(n));

  // Leave-one-out PMFs for a block of nodes are materialized, then folded
  // into the per-item accumulators in node order.
  const std::size_t block = 64;
  std::vector<std::vector<std::vector<double>>> loo(block);
  for (std::size_t start = 0; start < quad.size(); start += block) {
    const std::size_t count = std::min(block, quad.size() - start);
    parallel_for(count, [&](std::size_t b) {
      auto& slot = loo[b];
      slot.assign(n, {});
      auto emit = [&](std::size_t i, const std::vector<double>& pmf) { slot[i] = pmf; };
      leave_one_out(values[start + b], 0, n, std::vector<double>{1.0}, emit);
    });
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t b = 0; b < count; ++b) {
        const std::size_t q = start + b;
        acc[i].add(loo[b][i], quad.weights()[q], values[q][i],
                   in_tail(quad.nodes()[q], options.delta));
      }
    });
  }

  std::vector<RestScoreTable> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(acc[i].finish(i, options.delta));
  return out;
}

}  // namespace irtid
