#include <gtest/gtest.h>

#include <map>
#include <set>
#include <vector>

#include "bce/monotonicity.hpp"
#include "bce/strategy.hpp"
#include "oracles.hpp"

namespace bce {
namespace {

TEST(MakeStrategy, StepSemantics) {
  const auto s = make_strategy({0.0, 1.0}, {0.0, 0.5});
  EXPECT_EQ(s(0.7), 0.0);
  EXPECT_EQ(s(1.0), 0.5);
  EXPECT_EQ(s(-1.0), 0.0);
  const auto c = make_strategy({0.0, 0.5, 1.0}, {0.2, 0.2, 0.2});
  EXPECT_TRUE(c.is_monotone());
  EXPECT_EQ(c, Strategy::constant({0.0, 0.5, 1.0}, 0.2));
}

TEST(MakeStrategy, ReportsFirstViolation) {
  try {
    make_strategy({0.0, 1.0}, {0.5, 0.0});
    FAIL() << "expected MonotonicityError";
  } catch (const MonotonicityError& e) {
    EXPECT_EQ(e.pair(), (std::pair<std::size_t, std::size_t>{0, 1}));
  }
  try {
    make_strategy({0.0, 0.5, 1.0, 1.5}, {0.0, 0.5, 0.5, 0.25});
    FAIL() << "expected MonotonicityError";
  } catch (const MonotonicityError& e) {
    EXPECT_EQ(e.pair(), (std::pair<std::size_t, std::size_t>{2, 3}));
  }
}

TEST(MakeStrategy, RejectsMalformed) {
  EXPECT_THROW(make_strategy({}, {}), InputError);
  EXPECT_THROW(make_strategy({0.0, 1.0}, {0.0}), InputError);
  EXPECT_THROW(make_strategy({1.0, 0.0}, {0.0, 0.0}), InputError);
  EXPECT_THROW(make_strategy({0.0, 0.0}, {0.0, 0.0}), InputError);
  EXPECT_THROW(make_strategy({0.0}, {-0.1}), InputError);
}

TEST(EnumerateMonotone, SmallCounts) {
  const std::vector<double> g3{0.0, 0.5, 1.0};
  EXPECT_EQ(enumerate_monotone(g3, g3).size(), 10u);
  EXPECT_EQ(enumerate_monotone({0.5}, {0.0, 0.25, 0.5, 0.75}).size(), 4u);
  const auto two = enumerate_monotone({0.0, 1.0}, {0.0, 1.0});
  ASSERT_EQ(two.size(), 3u);
  EXPECT_EQ(two[0].bids(), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(two[1].bids(), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(two[2].bids(), (std::vector<double>{1.0, 1.0}));
}

TEST(EnumerateMonotone, MatchesBruteForceFilter) {
  for (std::size_t v = 1; v <= 6; ++v) {
    for (std::size_t b = 1; b <= 6; ++b) {
      std::vector<double> values(v), grid(b);
      for (std::size_t k = 0; k < v; ++k) values[k] = static_cast<double>(k);
      for (std::size_t k = 0; k < b; ++k) grid[k] = 0.1 * static_cast<double>(k);
      const auto listed = enumerate_monotone(values, grid);
      const auto expected = oracle::monotone_index_maps(v, b);
      ASSERT_EQ(listed.size(), expected.size()) << "V=" << v << " B=" << b;
      for (std::size_t s = 0; s < listed.size(); ++s) {
        EXPECT_TRUE(listed[s].is_monotone());
        for (std::size_t k = 0; k < v; ++k) EXPECT_EQ(listed[s].bids()[k], grid[expected[s][k]]);
        // Evaluating at a value point returns its bid exactly.
        for (std::size_t k = 0; k < v; ++k) EXPECT_EQ(listed[s](values[k]), listed[s].bids()[k]);
      }
    }
  }
}

TEST(EnumerateMonotone, CapExceededNamesCount) {
  std::vector<double> values(20), grid(20);
  for (std::size_t k = 0; k < 20; ++k) values[k] = grid[k] = static_cast<double>(k);
  try {
    enumerate_monotone(values, grid);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("C(39, 20)"), std::string::npos) << e.what();
  }
  EXPECT_EQ(monotone_count(20, 20, ~0ull), 68923264410ull);
}

TEST(RandomMonotone, SortedPairFrequencies) {
  const std::vector<double> values{0.0, 1.0};
  const std::vector<double> grid{0.0, 1.0};
  std::map<std::vector<double>, int> counts;
  const int draws = 100000;
  for (int s = 0; s < draws; ++s) ++counts[random_monotone(values, grid, static_cast<std::uint64_t>(s)).bids()];
  ASSERT_EQ(counts.size(), 3u);
  const std::vector<double> low{0.0, 0.0}, mixed{0.0, 1.0}, high{1.0, 1.0};
  EXPECT_NEAR(counts[low] / double(draws), 0.25, 0.01);
  EXPECT_NEAR(counts[mixed] / double(draws), 0.50, 0.01);
  EXPECT_NEAR(counts[high] / double(draws), 0.25, 0.01);
}

TEST(RandomMonotone, ValidAndDeterministic) {
  const std::vector<double> values{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::set<std::vector<double>> seen;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto a = random_monotone(values, grid, s);
    EXPECT_TRUE(a.is_monotone());
    EXPECT_EQ(a, random_monotone(values, grid, s));
    for (double b : a.bids()) EXPECT_TRUE(std::find(grid.begin(), grid.end(), b) != grid.end());
    seen.insert(a.bids());
  }
  EXPECT_GT(seen.size(), 100u);
  std::set<double> single;
  for (std::uint64_t s = 0; s < 200; ++s) single.insert(random_monotone({0.5}, grid, s).bids()[0]);
  EXPECT_EQ(single.size(), grid.size());
}

TEST(CorrelatedProfile, Validation) {
  const auto a = make_strategy({0.0, 1.0}, {0.0, 0.5});
  const auto b = make_strategy({0.0, 1.0}, {0.5, 0.5});
  EXPECT_NO_THROW(CorrelatedProfile({{{a, b}, 0.5}, {{b, b}, 0.5}}));
  EXPECT_THROW(CorrelatedProfile({{{a, b}, 0.5}, {{a, b}, 0.5}}), InputError);
  EXPECT_THROW(CorrelatedProfile({{{a, b}, 0.5}, {{b, b}, 0.4}}), InputError);
  EXPECT_THROW(CorrelatedProfile({{{a, b}, 1.5}, {{b, b}, -0.5}}), InputError);
  EXPECT_THROW(CorrelatedProfile({{{a, b}, 0.5}, {{b}, 0.5}}), InputError);
  EXPECT_THROW(CorrelatedProfile({}), InputError);
}

TEST(StrategyJson, RoundTrip) {
  const auto a = make_strategy({0.0, 1.0}, {0.0, 0.5});
  const auto b = make_strategy({0.0, 0.5, 1.0}, {0.25, 0.25, 1.0});
  EXPECT_EQ(strategy_from_json(to_json(a)), a);
  const CorrelatedProfile q({{{a, b}, 0.25}, {{b, a}, 0.75}});
  const auto back = profile_from_json(to_json(q));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.atoms()[1].joint, q.atoms()[1].joint);
  EXPECT_EQ(back.atoms()[1].prob, 0.75);
  EXPECT_THROW(strategy_from_json({{"values", {0.0}}}), InputError);
}

class EssentialMonotonicity : public ::testing::Test {
 protected:
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const AuctionSpec spec = AuctionSpec::first_price(2, 1.0, grid);
  const ProductDistribution dist{{DiscreteDist::uniform({0.0, 1.0}), DiscreteDist::uniform({0.0, 1.0})}};
  const Strategy decreasing = Strategy::step({0.0, 1.0}, {0.5, 0.0});
};

TEST_F(EssentialMonotonicity, MonotoneProfilesPass) {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<ProfileAtom> atoms;
    for (int a = 0; a < 3; ++a) {
      JointStrategy joint{random_monotone({0.0, 1.0}, grid, rng), random_monotone({0.0, 1.0}, grid, rng)};
      bool dup = false;
      for (const auto& at : atoms) dup = dup || at.joint == joint;
      if (!dup) atoms.push_back({joint, 0.0});
    }
    for (auto& at : atoms) at.prob = 1.0 / static_cast<double>(atoms.size());
    EXPECT_TRUE(essential_monotonicity_check(CorrelatedProfile(atoms), dist, spec).passed);
  }
}

TEST_F(EssentialMonotonicity, NonMonotoneNeverWinningPasses) {
  const auto q = CorrelatedProfile::point_mass({decreasing, Strategy::constant({0.0, 1.0}, 1.0)});
  EXPECT_TRUE(essential_monotonicity_check(q, dist, spec).passed);
}

TEST_F(EssentialMonotonicity, NonMonotoneWinningFailsWithWitness) {
  const auto q = CorrelatedProfile::point_mass({decreasing, Strategy::constant({0.0, 1.0}, 0.0)});
  const auto rep = essential_monotonicity_check(q, dist, spec);
  EXPECT_FALSE(rep.passed);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].bidder, 0u);
  EXPECT_EQ(rep.violations[0].low_value, 0.0);
  EXPECT_EQ(rep.violations[0].high_value, 1.0);
  EXPECT_DOUBLE_EQ(rep.violations[0].win_probability, 1.0);
}

}  // namespace
}  // namespace bce
