#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "bce/estimate.hpp"
#include "oracles.hpp"

namespace bce {
namespace {

const std::vector<double> kGrid{0.0, 0.5, 1.0};

double dp(std::vector<BidMixture> mixes) { return win_tie_dp(mixes); }

TEST(WinTieDp, Examples) {
  EXPECT_DOUBLE_EQ(dp({{1, 0, 0}}), 1.0);
  EXPECT_DOUBLE_EQ(dp({{0, 0, 1}}), 0.0);
  EXPECT_DOUBLE_EQ(dp({{0.5, 0.5, 0}, {0.5, 0.5, 0}}), 7.0 / 12.0);
  EXPECT_DOUBLE_EQ(dp({}), 1.0);
  EXPECT_DOUBLE_EQ(dp({{0, 1, 0}, {0, 1, 0}, {0, 1, 0}}), 0.25);
}

TEST(WinTieDp, MatchesOutcomeEnumeration) {
  Rng rng(17);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t k = rng.uniform_index(6);
    std::vector<BidMixture> mixes(k);
    for (auto& m : mixes) {
      const double a = rng.uniform01(), b = rng.uniform01(), c = rng.uniform01();
      m = {a / (a + b + c), b / (a + b + c), c / (a + b + c)};
    }
    // Enumerate all 3^k outcomes of (below, equal, above).
    double expect = 0.0;
    std::vector<int> o(k, 0);
    while (true) {
      double p = 1.0;
      bool above = false;
      std::size_t tied = 0;
      for (std::size_t j = 0; j < k; ++j) {
        p *= o[j] == 0 ? mixes[j].below : o[j] == 1 ? mixes[j].equal : mixes[j].above;
        above = above || o[j] == 2;
        tied += o[j] == 1;
      }
      if (!above) expect += p / static_cast<double>(tied + 1);
      std::size_t pos = k;
      while (pos > 0 && ++o[pos - 1] == 3) o[--pos] = 0;
      if (pos == 0) break;
    }
    EXPECT_NEAR(dp(mixes), expect, 1e-12);
  }
}

class TwoBidder : public ::testing::Test {
 protected:
  const AuctionSpec fpa = AuctionSpec::first_price(2, 1.0, {0.0, 0.5, 0.6, 1.0});
  const Strategy identity = make_strategy({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0});
  const ProductDistribution dist{std::vector<DiscreteDist>{DiscreteDist::point_mass(0.8),
                                                           DiscreteDist::uniform({0.0, 0.5, 1.0})}};
  JointStrategy joint{Strategy::constant({0.8}, 0.6), identity};
};

TEST_F(TwoBidder, InterimExamples) {
  EXPECT_NEAR(interim_utility_exact(fpa, {0, 0.8, 0.6, joint}, dist), 0.8 / 6.0, 1e-15);
  EXPECT_NEAR(interim_utility_exact(fpa, {0, 0.8, 0.5, joint}, dist), 0.15, 1e-15);
  EXPECT_EQ(interim_utility_exact(fpa, {0, 0.5, 0.5, joint}, dist), 0.0);
  EXPECT_THROW(interim_utility_exact(fpa, {0, 0.8, 1.5, joint}, dist), InputError);
  EXPECT_THROW(interim_utility_exact(fpa, {0, 1.5, 0.5, joint}, dist), InputError);
}

TEST_F(TwoBidder, MonteCarloAgrees) {
  const InterimQuery q{0, 0.8, 0.5, joint};
  const auto mc = monte_carlo_estimate(fpa, dist, q, 10000, 9);
  EXPECT_NEAR(mc.mean, 0.15, 4 * mc.std_error);
  const auto again = monte_carlo_estimate(fpa, dist, q, 10000, 9);
  EXPECT_EQ(mc.mean, again.mean);
  EXPECT_EQ(mc.std_error, again.std_error);
  EXPECT_THROW(monte_carlo_estimate(fpa, dist, q, 1, 9), InputError);
}

TEST(MonteCarlo, PointMassIsExact) {
  const auto spec = AuctionSpec::first_price(3, 1.0, kGrid);
  const ProductDistribution d(std::vector<DiscreteDist>(3, DiscreteDist::point_mass(1.0)));
  const JointStrategy joint(3, Strategy::constant({1.0}, 0.5));
  const auto mc = monte_carlo_estimate(spec, d, {0, 1.0, 0.5, joint}, 100, 1);
  EXPECT_DOUBLE_EQ(mc.mean, 0.5 / 3.0);
  EXPECT_EQ(mc.std_error, 0.0);
}

TEST(EmpEstimate, TwoRowExample) {
  const auto spec = AuctionSpec::first_price(2, 1.0, kGrid);
  const JointStrategy joint{make_strategy({0.0, 1.0}, {0.0, 0.5}), make_strategy({0.0, 1.0}, {0.0, 1.0})};
  const auto s = SampleMatrix::from_rows({{0.3, 0.0}, {0.9, 1.0}});
  EXPECT_DOUBLE_EQ(emp_estimate(spec, s, 0, 1.0, joint), 0.25);
  EXPECT_DOUBLE_EQ(empp_estimate(spec, s, 0, 1.0, joint), 0.25);
  const auto one = SampleMatrix::from_rows({{0.0, 0.0}});
  EXPECT_DOUBLE_EQ(emp_estimate(spec, one, 0, 1.0, joint), ex_post_utility(spec, 0, 1.0, {0.5, 0.0}));
}

TEST(EmppEstimate, ProductDiffersFromJoint) {
  const auto spec = AuctionSpec::first_price(3, 1.0, kGrid);
  const Strategy identity = make_strategy({0.0, 1.0}, {0.0, 1.0});
  const JointStrategy joint{Strategy::constant({1.0}, 0.5), identity, identity};
  const auto s = SampleMatrix::from_rows({{1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}});
  EXPECT_DOUBLE_EQ(empp_estimate(spec, s, 0, 1.0, joint), 0.125);
  EXPECT_DOUBLE_EQ(emp_estimate(spec, s, 0, 1.0, joint), 0.0);
}

// Random instances shared by the property tests below.
struct Instance {
  AuctionSpec spec;
  ProductDistribution dist;
  JointStrategy joint;
};

Instance random_instance(Rng& rng, std::size_t max_n, std::size_t max_support) {
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::size_t n = 1 + rng.uniform_index(max_n);
  const bool all_pay = rng.uniform_index(2) == 1;
  auto spec = all_pay ? AuctionSpec::all_pay(n, 1.0, grid) : AuctionSpec::first_price(n, 1.0, grid);
  std::vector<DiscreteDist> marginals;
  JointStrategy joint;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = 1 + rng.uniform_index(max_support);
    std::vector<double> pts(grid);
    for (std::size_t a = pts.size(); a > 1; --a) std::swap(pts[a - 1], pts[rng.uniform_index(a)]);
    pts.resize(k);
    std::sort(pts.begin(), pts.end());
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) total += (x = 0.05 + rng.uniform01());
    for (auto& x : w) x /= total;
    marginals.emplace_back(pts, w);
    joint.push_back(random_monotone(pts, grid, rng));
  }
  return {spec, ProductDistribution(marginals), joint};
}

TEST(InterimUtility, MatchesBruteForceOnRandomInstances) {
  Rng rng(2024);
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  for (int rep = 0; rep < 1500; ++rep) {
    const auto inst = random_instance(rng, 4, 4);
    const std::size_t i = rng.uniform_index(inst.spec.bidders());
    const double v = grid[rng.uniform_index(grid.size())];
    const double b = grid[rng.uniform_index(grid.size())];
    EXPECT_NEAR(interim_utility_exact(inst.spec, {i, v, b, inst.joint}, inst.dist),
                oracle::interim_utility(inst.spec, i, v, b, inst.joint, inst.dist), 1e-9);
  }
}

TEST(InterimUtility, MonteCarloWithinFourStandardErrors) {
  Rng rng(77);
  int outside = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const auto inst = random_instance(rng, 4, 4);
    const double v = 0.75, b = 0.5;
    const double exact = interim_utility_exact(inst.spec, {0, v, b, inst.joint}, inst.dist);
    const auto mc = monte_carlo_estimate(inst.spec, inst.dist, {0, v, b, inst.joint}, 10000,
                                         static_cast<std::uint64_t>(rep));
    outside += std::abs(mc.mean - exact) > 4 * mc.std_error + 1e-12;
  }
  EXPECT_LE(outside, 1);
}

SampleMatrix random_samples(Rng& rng, std::size_t m, const ProductDistribution& dist) {
  std::vector<std::vector<double>> rows(m, std::vector<double>(dist.bidders()));
  for (auto& row : rows)
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = dist[j].sample(rng);
  return SampleMatrix::from_rows(rows);
}

TEST(Estimators, EmppIsExactOnEmpiricalProduct) {
  Rng rng(8);
  for (int rep = 0; rep < 300; ++rep) {
    const auto inst = random_instance(rng, 4, 3);
    const auto s = random_samples(rng, 1 + rng.uniform_index(12), inst.dist);
    const std::size_t i = rng.uniform_index(inst.spec.bidders());
    const double v = inst.dist[i].support().back();
    const auto prod = empirical_product(s);
    EXPECT_NEAR(empp_estimate(inst.spec, s, i, v, inst.joint),
                oracle::interim_utility(inst.spec, i, v, inst.joint[i](v), inst.joint, prod), 1e-12);
  }
}

TEST(Estimators, TwoBiddersEmpEqualsEmpp) {
  Rng rng(10);
  for (int rep = 0; rep < 300; ++rep) {
    Instance inst = random_instance(rng, 2, 4);
    if (inst.spec.bidders() != 2) continue;
    const auto s = random_samples(rng, 1 + rng.uniform_index(20), inst.dist);
    for (std::size_t i = 0; i < 2; ++i) {
      for (double v : inst.dist[i].support())
        EXPECT_NEAR(emp_estimate(inst.spec, s, i, v, inst.joint), empp_estimate(inst.spec, s, i, v, inst.joint),
                    1e-12);
    }
  }
}

TEST(Estimators, RowOrderInvariant) {
  Rng rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const auto inst = random_instance(rng, 4, 3);
    const std::size_t m = 2 + rng.uniform_index(10);
    const auto s = random_samples(rng, m, inst.dist);
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < m; ++r) rows.emplace_back(s.row(r), s.row(r) + s.cols());
    std::reverse(rows.begin(), rows.end());
    const auto flipped = SampleMatrix::from_rows(rows);
    const double v = inst.dist[0].support().front();
    EXPECT_NEAR(emp_estimate(inst.spec, s, 0, v, inst.joint), emp_estimate(inst.spec, flipped, 0, v, inst.joint),
                1e-12);
    EXPECT_NEAR(empp_estimate(inst.spec, s, 0, v, inst.joint),
                empp_estimate(inst.spec, flipped, 0, v, inst.joint), 1e-12);
  }
}

TEST(Estimators, IdenticalRowsGiveExPost) {
  const auto spec = AuctionSpec::first_price(3, 1.0, kGrid);
  const Strategy identity = make_strategy({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0});
  const JointStrategy joint(3, identity);
  const auto s = SampleMatrix::from_rows({{1.0, 0.5, 0.0}, {1.0, 0.5, 0.0}, {1.0, 0.5, 0.0}});
  EXPECT_DOUBLE_EQ(emp_estimate(spec, s, 1, 0.5, joint), ex_post_utility(spec, 1, 0.5, {1.0, 0.5, 0.0}));
  EXPECT_DOUBLE_EQ(empp_estimate(spec, s, 2, 0.0, joint), ex_post_utility(spec, 2, 0.0, {1.0, 0.5, 0.0}));
}

}  // namespace
}  // namespace bce
