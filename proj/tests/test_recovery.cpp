#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "irtid/errors.hpp"
#include "irtid/experiments.hpp"
#include "irtid/recovery.hpp"
#include "irtid/special_fns.hpp"

using namespace irtid;

namespace {

ModelSpec ogive_model(double a, double b, std::size_t n) {
  return ModelSpec::homogeneous(Irf::from_params(ItemParams::normal_ogive(a, b)), n);
}

double max_knot_error(const RecoveryGrid& grid, const Irf& truth) {
  double worst = 0.0;
  for (const auto& e : grid.entries) worst = std::max(worst, std::fabs(e.p_hat - truth.eval(e.theta_k)));
  return worst;
}

}  // namespace

TEST(MeanIrf, IdentityItemsGiveIdentity) {
  const ModelSpec m = ModelSpec::homogeneous(Irf::identity(), 5);
  for (double t : {0.01, 0.25, 0.5, 0.9}) EXPECT_NEAR(mean_irf(m, 2, t), t, 1e-14);
  const MeanIrf mean(m, 0);
  EXPECT_NEAR(mean.slope(0.3), 1.0, 1e-12);
  EXPECT_EQ(mean.lower_limit(), 0.0);
  EXPECT_EQ(mean.upper_limit(), 1.0);
}

TEST(MeanIrf, MixedOgiveExample) {
  const ModelSpec m = ModelSpec::from_params(std::vector<ItemParams>{
      ItemParams::logistic_4pl(1, 0, 0.2, 0.9), ItemParams::normal_ogive(1, 0),
      ItemParams::normal_ogive(1, 1)});
  EXPECT_NEAR(mean_irf(m, 0, 0.5), 0.32932762696572853, 1e-12);
  EXPECT_THROW(mean_irf(m, 0, 0.0), DomainError);
  EXPECT_THROW(mean_irf(m, 0, 1.0), DomainError);
}

TEST(MeanIrf, FourPlMeanStaysBetweenAsymptotes) {
  const ModelSpec m = heterogeneous_4pl_sampler(3).make(12);
  const MeanIrf mean(m, 4);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (j == 4) continue;
    lo += m.item(j).kappa();
    hi += m.item(j).gamma();
  }
  lo /= 11.0;
  hi /= 11.0;
  EXPECT_NEAR(mean.lower_limit(), lo, 1e-15);
  EXPECT_NEAR(mean.upper_limit(), hi, 1e-15);
  double prev = 0.0;
  for (int j = 1; j < 1000; ++j) {
    const double v = mean.value(j / 1000.0);
    EXPECT_GE(v, lo);
    EXPECT_LE(v, hi);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(InvertMeanIrf, SharedOgiveKnot) {
  EXPECT_NEAR(invert_mean_irf(ogive_model(1, 1, 5), 0, 0.5), 0.84134474606854295, 1e-10);
}

TEST(InvertMeanIrf, IdentityKnotsAreExact) {
  const ModelSpec m = ModelSpec::homogeneous(Irf::identity(), 11);
  for (std::size_t k = 1; k < 10; ++k) EXPECT_NEAR(invert_mean_irf(m, 0, k / 10.0), k / 10.0, 1e-12);
}

TEST(InvertMeanIrf, RoundTrip) {
  std::mt19937_64 gen(9);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ModelSpec m = heterogeneous_4pl_sampler(100 + s).make(9);
    const MeanIrf mean(m, s);
    std::uniform_real_distribution<double> u(mean.lower_limit(), mean.upper_limit());
    for (int trial = 0; trial < 200; ++trial) {
      const double target = u(gen);
      double theta = 0.0;
      try {
        theta = mean.invert(target);
      } catch (const NoSolutionError&) {
        // Targets within the bracket's unreachable sliver near the asymptotes.
        EXPECT_TRUE(target <= mean.value(MeanIrf::kBracketLow) ||
                    target >= mean.value(MeanIrf::kBracketHigh));
        continue;
      }
      // Near θ = 1 the slope is steep enough that adjacent doubles straddle the target.
      const double ulp = std::nextafter(theta, 1.0) - theta;
      const double resolution = mean.slope(theta) * ulp;
      EXPECT_NEAR(mean.value(theta), target, std::max(1e-11, resolution)) << theta;
    }
  }
}

TEST(InvertMeanIrf, OutsideAttainableRange) {
  const ModelSpec m = ModelSpec::from_params(std::vector<ItemParams>{
      ItemParams::logistic_4pl(1, 0, 0.2, 0.9), ItemParams::logistic_4pl(1, 0, 0.2, 0.9)});
  const MeanIrf mean(m, 0);
  EXPECT_THROW(mean.invert(0.2), NoSolutionError);
  EXPECT_THROW(mean.invert(0.1), NoSolutionError);
  EXPECT_THROW(mean.invert(0.9), NoSolutionError);
  EXPECT_THROW(mean.invert(0.5, 0.6, 0.9), NoSolutionError);
  EXPECT_NO_THROW(mean.invert(0.5));
}

TEST(RecoverOracle, TwoItemsGiveEmptyGrid) {
  EXPECT_THROW(recover_irf_oracle(ModelSpec::homogeneous(Irf::identity(), 2), 0, 0.01, 0.99),
               EmptyGridError);
}

TEST(RecoverOracle, ElevenIdentityItems) {
  const auto grid = recover_irf_oracle(ModelSpec::homogeneous(Irf::identity(), 11), 0, 0.01, 0.99);
  ASSERT_EQ(grid.entries.size(), 9u);
  for (const auto& e : grid.entries) {
    EXPECT_NEAR(e.theta_k, e.k / 10.0, 1e-12);
    EXPECT_NEAR(e.p_hat, (e.k + 1.0) / 12.0, 1e-12);
    EXPECT_LE(std::fabs(e.p_hat - e.theta_k), 0.1);
  }
}

TEST(RecoverOracle, KnotsIncreaseAndStayInsideInterval) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const ModelSpec m = heterogeneous_4pl_sampler(40 + s).make(30);
    for (std::size_t i : {0, 7, 29}) {
      const auto grid = recover_irf_oracle(m, i, 0.1, 0.9);
      ASSERT_FALSE(grid.entries.empty());
      for (std::size_t j = 0; j < grid.entries.size(); ++j) {
        EXPECT_GT(grid.entries[j].theta_k, 0.1);
        EXPECT_LT(grid.entries[j].theta_k, 0.9);
        if (j > 0) {
          EXPECT_GT(grid.entries[j].theta_k, grid.entries[j - 1].theta_k);
          EXPECT_EQ(grid.entries[j].k, grid.entries[j - 1].k + 1);
        }
      }
    }
  }
}

TEST(RecoverOracle, ErrorShrinksFromFiftyOneToTwoHundredOne) {
  const Irf truth = Irf::from_params(ItemParams::normal_ogive(1, 1));
  const double e51 = max_knot_error(recover_irf_oracle(ogive_model(1, 1, 51), 0, 0.1, 0.9), truth);
  const double e201 = max_knot_error(recover_irf_oracle(ogive_model(1, 1, 201), 0, 0.1, 0.9), truth);
  EXPECT_LT(e201, e51);
}

TEST(RecoverOracle, ErrorNonincreasingAlongDoublingN) {
  const Irf truth = Irf::from_params(ItemParams::normal_ogive(1, 1));
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {25, 50, 100, 200, 400}) {
    const double e = max_knot_error(recover_irf_oracle(ogive_model(1, 1, n), 0, 0.1, 0.9), truth);
    EXPECT_LE(e, 1.1 * prev) << n;
    prev = e;
  }
}

TEST(RecoverOracle, KnotSpacingBound) {
  // Every θ in (α, β) lies within 2/(m(n−1)) of some knot.
  const double alpha = 0.1;
  const double beta = 0.9;
  for (const auto& p : {ItemParams::normal_ogive(1, 1), ItemParams::logistic_4pl(1.3, -0.4, 0.1, 0.95)}) {
    const Irf irf = Irf::from_params(p);
    const double m = check_condition3(irf, alpha, beta).m;
    for (std::size_t n : {21, 81}) {
      const ModelSpec model = ModelSpec::homogeneous(irf, n);
      const MeanIrf mean(model, 0);
      std::vector<double> knots;
      for (std::size_t k = 0; k < n; ++k) {
        try {
          knots.push_back(mean.invert(static_cast<double>(k) / (n - 1)));
        } catch (const NoSolutionError&) {
        }
      }
      const double bound = 2.0 / (m * (n - 1));
      std::mt19937_64 gen(n);
      std::uniform_real_distribution<double> u(alpha, beta);
      for (int trial = 0; trial < 500; ++trial) {
        const double t = u(gen);
        double nearest = 1.0;
        for (double k : knots) nearest = std::min(nearest, std::fabs(k - t));
        EXPECT_LE(nearest, bound) << "n=" << n << " theta=" << t;
      }
    }
  }
}

TEST(RecoverOracle, KnotsIgnoreTheTargetItem) {
  auto params = std::vector<ItemParams>(15, ItemParams::normal_ogive(1.2, 0.3));
  const ModelSpec base = ModelSpec::from_params(params);
  params[4] = ItemParams::logistic_4pl(2.5, -1.0, 0.25, 0.8);
  const ModelSpec swapped = ModelSpec::from_params(params);
  const auto a = recover_irf_oracle(base, 4, 0.05, 0.95);
  const auto b = recover_irf_oracle(swapped, 4, 0.05, 0.95);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t j = 0; j < a.entries.size(); ++j) {
    EXPECT_EQ(a.entries[j].k, b.entries[j].k);
    EXPECT_EQ(a.entries[j].theta_k, b.entries[j].theta_k);
  }
}

TEST(RecoverOracle, AllItemsMatchSingleItem) {
  const ModelSpec m = heterogeneous_4pl_sampler(5).make(14);
  const auto all = recover_all_oracle(m, 0.1, 0.9);
  ASSERT_EQ(all.size(), m.size());
  for (std::size_t i : {0, 6, 13}) {
    const auto one = recover_irf_oracle(m, i, 0.1, 0.9);
    ASSERT_EQ(all[i].entries.size(), one.entries.size());
    for (std::size_t j = 0; j < one.entries.size(); ++j) {
      EXPECT_NEAR(all[i].entries[j].theta_k, one.entries[j].theta_k, 1e-12);
      EXPECT_NEAR(all[i].entries[j].p_hat, one.entries[j].p_hat, 1e-12);
    }
  }
}

TEST(RecoveryGrid, Interpolation) {
  RecoveryGrid g;
  g.entries = {{1, 0.2, 0.3}, {2, 0.4, 0.5}, {3, 0.8, 0.9}};
  EXPECT_DOUBLE_EQ(g.interpolate(0.1), 0.3);
  EXPECT_DOUBLE_EQ(g.interpolate(0.3), 0.4);
  EXPECT_DOUBLE_EQ(g.interpolate(0.6), 0.7);
  EXPECT_DOUBLE_EQ(g.interpolate(0.95), 0.9);
}

TEST(RecoverEmpirical, MajorityItemIncreases) {
  const std::size_t rows = 3000;
  const std::size_t n = 10;
  ResponseMatrix y(rows, n);
  std::mt19937_64 gen(4);
  for (std::size_t r = 0; r < rows; ++r) {
    // Ability-like row propensity so that rest scores spread out.
    const double p = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    std::size_t ones = 0;
    for (std::size_t j = 1; j < n; ++j) {
      y(r, j) = std::uniform_real_distribution<double>(0.0, 1.0)(gen) < p;
      ones += y(r, j);
    }
    y(r, 0) = 2 * ones > n - 1;
  }
  const auto reg = recover_irf_empirical(y, 0);
  ASSERT_GE(reg.bins.size(), 2u);
  std::size_t total = 0;
  for (std::size_t b = 0; b < reg.bins.size(); ++b) {
    total += reg.bins[b].count;
    EXPECT_GE(reg.bins[b].count, kDefaultMinBinSize);
    if (b > 0) {
      EXPECT_GE(reg.bins[b].p_hat, reg.bins[b - 1].p_hat);
      EXPECT_GT(reg.bins[b].theta, reg.bins[b - 1].theta);
      EXPECT_EQ(reg.bins[b].score_lo, reg.bins[b - 1].score_hi + 1);
    }
  }
  EXPECT_EQ(total, rows);
  EXPECT_EQ(reg.bins.front().p_hat, 0.0);
  EXPECT_EQ(reg.bins.back().p_hat, 1.0);
}

TEST(RecoverEmpirical, RowOrderDoesNotMatter) {
  const ModelSpec m = heterogeneous_4pl_sampler(8).make(12);
  const ResponseMatrix y = simulate_responses({77, 2000, m});
  std::vector<std::size_t> order(y.rows());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
  ResponseMatrix shuffled(y.rows(), y.cols());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t c = 0; c < y.cols(); ++c) shuffled(r, c) = y(order[r], c);
  }
  for (std::size_t item : {0, 5, 11}) {
    const auto a = recover_irf_empirical(y, item);
    const auto b = recover_irf_empirical(shuffled, item);
    ASSERT_EQ(a.bins.size(), b.bins.size());
    for (std::size_t j = 0; j < a.bins.size(); ++j) {
      EXPECT_EQ(a.bins[j].count, b.bins[j].count);
      EXPECT_EQ(a.bins[j].p_hat, b.bins[j].p_hat);
      EXPECT_EQ(a.bins[j].theta, b.bins[j].theta);
    }
  }
}

TEST(RecoverEmpirical, InputValidation) {
  ResponseMatrix small(99, 3);
  EXPECT_THROW(recover_irf_empirical(small, 0), ValidationError);
  ResponseMatrix y(200, 3);
  for (std::size_t r = 0; r < 200; ++r) {
    y(r, 0) = 1;
    y(r, 1) = r % 2;
    y(r, 2) = r % 3 == 0;
  }
  EXPECT_THROW(recover_irf_empirical(y, 0), DegenerateError);
  EXPECT_THROW(recover_irf_empirical(y, 3), ValidationError);
  EXPECT_NO_THROW(recover_irf_empirical(y, 1));
  const auto all = recover_all_empirical(y);
  EXPECT_EQ(all.items.size(), 2u);
  ASSERT_EQ(all.warnings.size(), 1u);
  y(5, 1) = 2;
  EXPECT_THROW(recover_irf_empirical(y, 1), ValidationError);
}

TEST(RecoverEmpirical, LargeSampleTracksTruth) {
  const Irf truth = Irf::from_params(ItemParams::logistic_4pl(1, 0, 0, 1));
  const ModelSpec m = ModelSpec::homogeneous(truth, 50);
  const ResponseMatrix y = simulate_responses({20240917, 100000, m});
  const auto rec = recover_all_empirical(y);
  ASSERT_EQ(rec.items.size(), m.size());
  std::vector<RecoveryGrid> grids;
  for (const auto& r : rec.items) grids.push_back(r.as_grid());
  const auto report = sup_diff(grids, m, 0.2, 0.8);
  EXPECT_LE(report.max_over_items, 0.05);
}

TEST(SupDiff, ModelAgainstItselfIsZero) {
  const ModelSpec m = heterogeneous_4pl_sampler(2).make(6);
  const auto r = sup_diff(m, m, 0.0, 1.0);
  EXPECT_EQ(r.max_over_items, 0.0);
  for (double v : r.per_item) EXPECT_EQ(v, 0.0);
}

TEST(SupDiff, IdentityAgainstLogisticOfProbit) {
  const ModelSpec id = ModelSpec::homogeneous(Irf::identity(), 3);
  const ModelSpec lg =
      ModelSpec::homogeneous(Irf::from_params(ItemParams::logistic_4pl(1, 0, 0, 1)), 3);
  const auto r = sup_diff(id, lg, 0.1, 0.9, 4001);
  ASSERT_EQ(r.per_item.size(), 3u);
  for (double v : r.per_item) EXPECT_NEAR(v, 0.11728622854064458, 1e-12);
  EXPECT_EQ(r.max_over_items, *std::max_element(r.per_item.begin(), r.per_item.end()));
}

TEST(SupDiff, TriangleInequality) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ModelSpec a = heterogeneous_4pl_sampler(3 * s).make(5);
    const ModelSpec b = heterogeneous_4pl_sampler(3 * s + 1).make(5);
    const ModelSpec c = heterogeneous_4pl_sampler(3 * s + 2).make(5);
    const auto ab = sup_diff(a, b, 0.05, 0.95);
    const auto bc = sup_diff(b, c, 0.05, 0.95);
    const auto ac = sup_diff(a, c, 0.05, 0.95);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_LE(ac.per_item[i], ab.per_item[i] + bc.per_item[i] + 1e-15);
    }
  }
}

TEST(SupDiff, GridAgainstGrid) {
  const ModelSpec m = heterogeneous_4pl_sampler(6).make(20);
  const auto grids = recover_all_oracle(m, 0.1, 0.9);
  const auto self = sup_diff(grids, grids, 0.1, 0.9);
  EXPECT_EQ(self.max_over_items, 0.0);
  const auto truth = sup_diff(grids, m, 0.1, 0.9);
  EXPECT_GT(truth.max_over_items, 0.0);
  EXPECT_LT(truth.max_over_items, 1.0);
}

TEST(SupDiff, Errors) {
  const ModelSpec a = ModelSpec::homogeneous(Irf::identity(), 3);
  const ModelSpec b = ModelSpec::homogeneous(Irf::identity(), 4);
  EXPECT_THROW(sup_diff(a, b, 0.1, 0.9), ValidationError);
  EXPECT_THROW(sup_diff(a, a, 0.9, 0.1), DomainError);
  EXPECT_THROW(sup_diff(a, a, 0.1, 0.9, 1), DomainError);
  std::vector<RecoveryGrid> empty(3);
  EXPECT_THROW(sup_diff(empty, a, 0.1, 0.9), EmptyGridError);
}
