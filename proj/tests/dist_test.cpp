#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "bce/dist.hpp"

namespace bce {
namespace {

TEST(DiscreteDist, RejectsInvalid) {
  EXPECT_THROW(DiscreteDist({0.0, 1.0}, {0.5, 0.6}), InputError);
  EXPECT_THROW(DiscreteDist({1.0, 0.0}, {0.5, 0.5}), InputError);
  EXPECT_THROW(DiscreteDist({0.0, 1.0}, {1.2, -0.2}), InputError);
  EXPECT_THROW(DiscreteDist({}, {}), InputError);
}

TEST(DrawSamples, PointMassesGiveConstantRows) {
  const ProductDistribution d({DiscreteDist::point_mass(0.5), DiscreteDist::point_mass(1.0)});
  const auto s = draw_samples(d, 3, 7);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(s(r, 0), 0.5);
    EXPECT_EQ(s(r, 1), 1.0);
  }
}

TEST(DrawSamples, DeterministicForSeed) {
  const ProductDistribution d({DiscreteDist({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5}), DiscreteDist::uniform({0.0, 1.0})});
  EXPECT_EQ(draw_samples(d, 200, 42).data(), draw_samples(d, 200, 42).data());
  EXPECT_NE(draw_samples(d, 200, 42).data(), draw_samples(d, 200, 43).data());
}

TEST(DrawSamples, BernoulliMean) {
  const ProductDistribution d({DiscreteDist({0.0, 1.0}, {0.7, 0.3})});
  const auto s = draw_samples(d, 100000, 11);
  const auto col = s.column(0);
  double mean = 0.0;
  for (double x : col) mean += x;
  mean /= static_cast<double>(col.size());
  EXPECT_NEAR(mean, 0.3, 0.01);
}

TEST(DrawSamples, ZeroRowsIsError) {
  const ProductDistribution d({DiscreteDist::point_mass(0.5)});
  EXPECT_THROW(draw_samples(d, 0, 1), InputError);
}

TEST(Empirical, UniformWeights) {
  auto e = empirical(SampleMatrix::from_rows({{0, 1}, {1, 1}}));
  ASSERT_EQ(e.points.size(), 2u);
  EXPECT_DOUBLE_EQ(e.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(e.weights[1], 0.5);

  e = empirical(SampleMatrix::from_rows({{0, 1}, {0, 1}}));
  ASSERT_EQ(e.points.size(), 1u);
  EXPECT_EQ(e.points[0], (std::vector<double>{0, 1}));
  EXPECT_DOUBLE_EQ(e.weights[0], 1.0);

  e = empirical(SampleMatrix::from_rows({{0, 0}, {0, 1}, {1, 1}}));
  ASSERT_EQ(e.points.size(), 3u);
  for (double w : e.weights) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
}

TEST(EmpiricalProduct, ColumnCounting) {
  auto p = empirical_product(SampleMatrix::from_rows({{0, 1}, {1, 0}}));
  EXPECT_EQ(p[0], DiscreteDist::uniform({0.0, 1.0}));
  EXPECT_EQ(p[1], DiscreteDist::uniform({0.0, 1.0}));

  p = empirical_product(SampleMatrix::from_rows({{0, 1}, {0, 1}}));
  EXPECT_EQ(p[0], DiscreteDist::point_mass(0.0));
  EXPECT_EQ(p[1], DiscreteDist::point_mass(1.0));

  p = empirical_product(SampleMatrix::from_rows({{0, 0}, {0, 1}, {1, 1}}));
  EXPECT_DOUBLE_EQ(p[0].mass(0.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[0].mass(1.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[1].mass(0.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[1].mass(1.0), 2.0 / 3.0);
}

TEST(EmpiricalProduct, MarginalsMatchEmpiricalOnRandomMatrices) {
  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t m = 1 + rng.uniform_index(8);
    const std::size_t n = 1 + rng.uniform_index(4);
    std::vector<std::vector<double>> rows(m, std::vector<double>(n));
    for (auto& row : rows)
      for (auto& x : row) x = 0.25 * static_cast<double>(rng.uniform_index(5));
    const auto s = SampleMatrix::from_rows(rows);
    const auto joint = empirical(s);
    const auto prod = empirical_product(s);
    for (std::size_t c = 0; c < n; ++c) {
      for (double v : prod[c].support()) {
        double marginal = 0.0;
        for (std::size_t k = 0; k < joint.points.size(); ++k)
          if (joint.points[k][c] == v) marginal += joint.weights[k];
        EXPECT_NEAR(prod[c].mass(v), marginal, 1e-12);
      }
    }
    // Row averages equal expectations under the empirical distribution.
    double avg = 0.0;
    for (const auto& row : rows) avg += std::sin(row[0]) + row.back();
    avg /= static_cast<double>(m);
    double expect = 0.0;
    for (std::size_t k = 0; k < joint.points.size(); ++k)
      expect += joint.weights[k] * (std::sin(joint.points[k][0]) + joint.points[k].back());
    EXPECT_NEAR(avg, expect, 1e-12);
  }
}

TEST(KlDivergence, Examples) {
  const DiscreteDist p({0.0, 1.0}, {0.88, 0.12});
  const DiscreteDist q({0.0, 1.0}, {0.92, 0.08});
  EXPECT_DOUBLE_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(p, q), 0.009538, 1e-5);
  EXPECT_LE(kl_divergence(biased_bernoulli(10, 0.2, +1), biased_bernoulli(10, 0.2, -1)), 10 * 0.04 / 10);
}

TEST(KlDivergence, MissingSupportIsDomainError) {
  EXPECT_THROW(kl_divergence(DiscreteDist::uniform({0.0, 1.0}), DiscreteDist::point_mass(0.0)), DomainError);
}

TEST(KlDivergence, BoundOnSweep) {
  for (double g = 0.01; g <= 0.5 + 1e-12; g += 0.01) {
    for (std::size_t n = 2; n <= 100; ++n) {
      const double kl = kl_divergence(biased_bernoulli(n, g, +1), biased_bernoulli(n, g, -1));
      EXPECT_LE(kl, 10 * g * g / static_cast<double>(n)) << "gamma " << g << " n " << n;
    }
  }
}

TEST(LowerBoundFamily, Construction) {
  const auto none = lower_bound_family(10, 0.2, std::vector<bool>(9, false));
  const auto all = lower_bound_family(10, 0.2, std::vector<bool>(9, true));
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(none[i].mass(1.0), 0.08, 1e-15);
    EXPECT_NEAR(all[i].mass(1.0), 0.12, 1e-15);
  }
  EXPECT_EQ(none[9], DiscreteDist::point_mass(1.0));
  EXPECT_EQ(all[9], DiscreteDist::point_mass(1.0));
  EXPECT_THROW(lower_bound_family(10, 0.5, std::vector<bool>(9)), InputError);
  EXPECT_THROW(lower_bound_family(10, 0.0, std::vector<bool>(9)), InputError);
  EXPECT_THROW(lower_bound_family(10, 0.2, std::vector<bool>(8)), InputError);
}

TEST(DistJson, RoundTrip) {
  const ProductDistribution d({DiscreteDist({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5}), DiscreteDist::point_mass(0.25)});
  const auto back = product_from_json(to_json(d));
  ASSERT_EQ(back.bidders(), 2u);
  EXPECT_EQ(back[0], d[0]);
  EXPECT_EQ(back[1], d[1]);
  EXPECT_THROW(product_from_json(nlohmann::json::object()), InputError);
}

TEST(SampleCsv, HeaderAndSidecar) {
  const auto s = SampleMatrix::from_rows({{0.5, 1.0}, {0.25, 0.0}});
  std::ostringstream out;
  write_csv(out, s);
  EXPECT_EQ(out.str(), "bidder_1,bidder_2\n0.5,1\n0.25,0\n");
  EXPECT_EQ(sidecar_json(s)["m"], 2);
  EXPECT_EQ(sidecar_json(s)["n"], 2);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(40.0), "40");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e-9), "1e-09");
  EXPECT_EQ(format_number(-0.25), "-0.25");
  Rng rng(2);
  for (int k = 0; k < 1000; ++k) {
    const double x = (rng.uniform01() - 0.5) * std::pow(10.0, static_cast<double>(rng.uniform_index(30)) - 15.0);
    EXPECT_EQ(std::strtod(format_number(x).c_str(), nullptr), x);
  }
}

}  // namespace
}  // namespace bce
