#include "irtid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irtid/errors.hpp"
#include "irtid/parallel.hpp"
#include "irtid/random.hpp"
#include "irtid/special_fns.hpp"

namespace irtid {

ResponseMatrix simulate_responses(const SimConfig& config) {
  const ModelSpec& model = config.model;
  const std::size_t n = model.size();
  ResponseMatrix out(config.num_respondents, n);
  parallel_for(config.num_respondents, [&](std::size_t r) {
    PhiloxStream rng(config.seed, r);
    const double theta = rng.next_uniform();
    auto row = out.row(r);
    if (model.shares_trait()) {
      const double lambda = model.item(0).latent_coordinate(theta);
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = rng.next_uniform() < model.item(j).eval_latent(lambda) ? 1 : 0;
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = rng.next_uniform() < model.item(j).eval(theta) ? 1 : 0;
      }
    }
  });
  return out;
}

// --- presets --------------------------------------------------------------------------

FamilySampler homogeneous_identity_sampler() {
  return {"homogeneous-identity",
          [](std::size_t n) { return ModelSpec::homogeneous(Irf::identity(), n); }};
}

FamilySampler homogeneous_normal_ogive_sampler() {
  return {"homogeneous-normal-ogive", [](std::size_t n) {
            return ModelSpec::homogeneous(Irf::from_params(ItemParams::normal_ogive(1.0, 1.0)),
                                          n);
          }};
}

FamilySampler heterogeneous_4pl_sampler(std::uint64_t seed) {
  return {"heterogeneous-4pl", [seed](std::size_t n) {
            std::vector<ItemParams> params;
            params.reserve(n);
            for (std::size_t j = 0; j < n; ++j) {
              PhiloxStream rng(seed, j);
              const double a = 0.5 + 1.5 * rng.next_uniform();
              const double b = -1.5 + 3.0 * rng.next_uniform();
              const double c = 0.25 * rng.next_uniform();
              const double d = 0.75 + 0.25 * rng.next_uniform();
              params.push_back(ItemParams::logistic_4pl(a, b, c, d));
            }
            return ModelSpec::from_params(params);
          }};
}

std::vector<std::string> preset_names() {
  return {"homogeneous-identity", "homogeneous-normal-ogive", "heterogeneous-4pl"};
}

std::optional<FamilySampler> find_preset(std::string_view name, std::uint64_t seed) {
  if (name == "homogeneous-identity") return homogeneous_identity_sampler();
  if (name == "homogeneous-normal-ogive") return homogeneous_normal_ogive_sampler();
  if (name == "heterogeneous-4pl") return heterogeneous_4pl_sampler(seed);
  return std::nullopt;
}

// --- convergence ----------------------------------------------------------------------

bool ConvergenceReport::decreasing_end_to_end() const {
  return errors.size() >= 2 && errors.back() < errors.front();
}

double log_log_slope(const std::vector<std::size_t>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t j = 0; j < std::min(x.size(), y.size()); ++j) {
    if (x[j] > 0 && y[j] > 0.0) {
      lx.push_back(std::log(static_cast<double>(x[j])));
      ly.push_back(std::log(y[j]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double count = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    mx += lx[j];
    my += ly[j];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sxy += (lx[j] - mx) * (ly[j] - my);
    sxx += (lx[j] - mx) * (lx[j] - mx);
  }
  return sxy / sxx;
}

namespace {

template <typename ErrorAt>
ConvergenceReport run_grid(std::string family, const std::vector<std::size_t>& n_grid,
                           double alpha, double beta, ErrorAt error_at) {
  ConvergenceReport report;
  report.family = std::move(family);
  report.alpha = alpha;
  report.beta = beta;
  for (std::size_t n : n_grid) {
    try {
      report.errors.push_back(error_at(n));
      report.n_grid.push_back(n);
    } catch (const EmptyGridError& e) {
      report.skipped.push_back(n);
      report.skip_reasons.emplace_back(e.what());
    } catch (const ValidationError& e) {
      report.skipped.push_back(n);
      report.skip_reasons.emplace_back(e.what());
    }
  }
  report.slope = log_log_slope(report.n_grid, report.errors);
  return report;
}

}  // namespace

ConvergenceReport convergence_experiment(const FamilySampler& sampler,
                                         const std::vector<std::size_t>& n_grid, double alpha,
                                         double beta, std::size_t sup_grid) {
  return run_grid(sampler.name, n_grid, alpha, beta, [&](std::size_t n) {
    const ModelSpec model = sampler.make(n);
    const auto grids = recover_all_oracle(model, alpha, beta);
    return sup_diff(grids, model, alpha, beta, sup_grid).max_over_items;
  });
}

ConvergenceReport cross_recovery_experiment(const FamilySampler& first,
                                            const FamilySampler& second,
                                            const std::vector<std::size_t>& n_grid, double alpha,
                                            double beta, std::size_t sup_grid) {
  return run_grid(first.name + " vs " + second.name, n_grid, alpha, beta, [&](std::size_t n) {
    const auto a = recover_all_oracle(first.make(n), alpha, beta);
    const auto b = recover_all_oracle(second.make(n), alpha, beta);
    return sup_diff(a, b, alpha, beta, sup_grid).max_over_items;
  });
}

// --- bound checks ------------------------------------------------------------------------

void LemmaCheckConfig::validate() const {
  if (!(delta > 0.0 && delta < 0.5)) throw ValidationError("delta must lie in (0, 1/2)");
  if (!(eta > 0.0 && eta < 0.5)) throw ValidationError("eta must lie in (0, 1/2)");
  if (!(alpha > 0.0 && alpha < beta && beta < 1.0)) {
    throw ValidationError("require 0 < alpha < beta < 1");
  }
  if (!(m >= 0.0)) throw ValidationError("m must be nonnegative");
  if (n_grid.empty()) throw ValidationError("n_grid must be nonempty");
  for (std::size_t n : n_grid) {
    if (n < 2) throw ValidationError("n_grid entries must be at least 2");
  }
}

bool all_pass(const std::vector<BoundCheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const BoundCheckReport& r) { return r.excluded || r.pass; });
}

namespace {

std::size_t lemma_k(double k_ratio, std::size_t n) {
  return static_cast<std::size_t>(std::lround(k_ratio * static_cast<double>(n - 1)));
}

// Rest-score tables for item 1 at every n, with k = round(k_ratio·(n − 1)).
// Judged sizes must put θ_k inside (alpha, beta).
template <typename Measure>
std::vector<BoundCheckReport> lemma_reports(const FamilySampler& sampler, double k_ratio,
                                            const LemmaCheckConfig& config, bool with_delta,
                                            Measure measure) {
  config.validate();
  if (!(k_ratio > 0.0 && k_ratio < 1.0)) throw DomainError("k_ratio must lie in (0,1)");
  std::vector<BoundCheckReport> out;
  for (std::size_t n : config.n_grid) {
    BoundCheckReport r;
    r.n = n;
    r.k = lemma_k(k_ratio, n);
    r.excluded = n < config.min_n;
    const ModelSpec model = sampler.make(n);
    const double target = static_cast<double>(r.k) / static_cast<double>(n - 1);
    try {
      const double theta_k = invert_mean_irf(model, 0, target);
      if (!(theta_k > config.alpha && theta_k < config.beta)) {
        throw NoSolutionError("theta_k = " + std::to_string(theta_k) + " outside (alpha, beta)");
      }
    } catch (const NoSolutionError& e) {
      if (!r.excluded) {
        throw NoSolutionError("k_ratio " + std::to_string(k_ratio) + " not attainable at n = " +
                              std::to_string(n) + ": " + e.what());
      }
      r.lhs = std::numeric_limits<double>::quiet_NaN();
      out.push_back(r);
      continue;
    }
    RestScoreOptions options;
    if (with_delta) options.delta = config.delta;
    r.lhs = measure(rest_score_table(model, 0, options), r);
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<BoundCheckReport> check_lemma1(const FamilySampler& sampler, double k_ratio,
                                           const LemmaCheckConfig& config) {
  auto out = lemma_reports(sampler, k_ratio, config, false,
                           [](const RestScoreTable& t, const BoundCheckReport& r) {
                             return static_cast<double>(r.n) * t.pmf[r.k];
                           });
  std::optional<double> reference;
  double running_min = std::numeric_limits<double>::infinity();
  for (auto& r : out) {
    r.lower_bound = true;
    if (r.excluded) {
      r.pass = false;
      continue;
    }
    if (!reference) reference = r.lhs;
    running_min = std::min(running_min, r.lhs);
    r.rhs = 0.5 * *reference;
    r.c_tilde_estimate = running_min;
    r.pass = r.lhs >= r.rhs && running_min > 0.0;
  }
  return out;
}

std::vector<BoundCheckReport> check_lemma2(const FamilySampler& sampler, double k_ratio,
                                           const LemmaCheckConfig& config) {
  auto out = lemma_reports(sampler, k_ratio, config, true,
                           [](const RestScoreTable& t, const BoundCheckReport& r) {
                             const auto& v = t.cond_trait_outside[r.k];
                             if (!v) throw DegenerateError("P(E_{n,k}) is negligible");
                             return *v;
                           });
  const BoundCheckReport* previous = nullptr;
  for (auto& r : out) {
    if (r.excluded) continue;
    if (!previous) {
      r.rhs = r.lhs;
      r.pass = true;
      r.c_tilde_estimate = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double dn = static_cast<double>(r.n) - static_cast<double>(previous->n);
      r.rhs = previous->lhs * std::exp(-kMinTailDecay * dn);
      if (r.lhs == 0.0) {
        r.c_tilde_estimate = std::numeric_limits<double>::infinity();
      } else if (previous->lhs == 0.0) {
        r.c_tilde_estimate = -std::numeric_limits<double>::infinity();
      } else {
        r.c_tilde_estimate = -(std::log(r.lhs) - std::log(previous->lhs)) / dn;
      }
      r.pass = r.lhs == 0.0 || r.lhs <= r.rhs;
    }
    previous = &r;
  }
  return out;
}

BoundCheckReport check_hoeffding(const ModelSpec& model, std::size_t excluded, double theta,
                                 double m, std::size_t trials, std::uint64_t seed) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0,1)");
  if (!(m >= 0.0)) throw DomainError("m must be nonnegative");
  if (trials == 0) throw DomainError("trials must be positive");
  const std::size_t n = model.size();
  const MeanIrf mean(model, excluded);
  const double center = mean.value(theta);
  std::vector<double> probs;
  probs.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != excluded) probs.push_back(model.item(j).eval(theta));
  }
  const double others = static_cast<double>(n - 1);

  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    PhiloxStream rng(seed, t);
    std::size_t sum = 0;
    for (double p : probs) sum += rng.next_uniform() < p ? 1 : 0;
    hit[t] = std::fabs(static_cast<double>(sum) / others - center) > m ? 1 : 0;
  });
  std::size_t count = 0;
  for (std::uint8_t h : hit) count += h;

  BoundCheckReport r;
  r.n = n;
  r.lhs = static_cast<double>(count) / static_cast<double>(trials);
  r.rhs = 2.0 * std::exp(-2.0 * others * m * m);
  r.tolerance = 3.0 * std::sqrt(r.lhs * (1.0 - r.lhs) / static_cast<double>(trials));
  r.pass = r.lhs <= r.rhs + r.tolerance;
  return r;
}

BoundCheckReport check_normal_approx(const ModelSpec& model, std::size_t excluded, double theta,
                                     std::size_t k) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0,1)");
  if (excluded >= model.size()) {
    throw ValidationError("excluded item out of range", static_cast<long>(excluded));
  }
  std::vector<double> probs;
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (j != excluded) probs.push_back(model.item(j).eval(theta));
  }
  if (probs.empty()) throw ValidationError("normal approximation needs at least 2 items");
  if (k > probs.size()) throw DomainError("k exceeds the number of remaining items");
  const auto moments = poisson_binomial_moments(probs);
  if (!(moments.sigma2 > 0.0)) throw DegenerateError("rest-score variance is zero");
  const double exact = poisson_binomial_pmf(probs)[k];
  const double sigma = std::sqrt(moments.sigma2);
  const double z = (static_cast<double>(k) - moments.mu + 0.5) / sigma;
  const double surrogate = normal_pdf(z) / sigma;

  BoundCheckReport r;
  r.n = model.size();
  r.k = k;
  r.lhs = std::fabs(exact - surrogate);
  r.rhs = 1.0 / moments.sigma2;
  r.c_tilde_estimate = r.lhs * moments.sigma2;
  r.excluded = probs.size() < kMinNormalApproxItems;
  r.pass = r.lhs <= r.rhs;
  return r;
}

}  // namespace irtid
