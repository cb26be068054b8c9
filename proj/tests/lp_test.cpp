#include <gtest/gtest.h>

#include <sstream>

#include "bce/lp.hpp"
#include "bce/rng.hpp"

namespace bce::lp {
namespace {

TEST(Simplex, TwoVariableMaximum) {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3.
  LinearProgram p;
  const auto x = p.add_variable("x", -3.0);
  const auto y = p.add_variable("y", -2.0);
  p.rows.push_back({{{x, 1.0}, {y, 1.0}}, Sense::LessEqual, 4.0, "a"});
  p.rows.push_back({{{x, 1.0}, {y, 3.0}}, Sense::LessEqual, 6.0, "b"});
  p.rows.push_back({{{x, 1.0}}, Sense::LessEqual, 3.0, "c"});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, -11.0, 1e-9);
  EXPECT_NEAR(s.x[x], 3.0, 1e-9);
  EXPECT_NEAR(s.x[y], 1.0, 1e-9);
}

TEST(Simplex, EqualityAndGreaterEqual) {
  // min x + 2y + 3z s.t. x + y + z = 1, y + z >= 0.5, z >= 0.2.
  LinearProgram p;
  const auto x = p.add_variable("x", 1.0);
  const auto y = p.add_variable("y", 2.0);
  const auto z = p.add_variable("z", 3.0);
  p.rows.push_back({{{x, 1.0}, {y, 1.0}, {z, 1.0}}, Sense::Equal, 1.0, ""});
  p.rows.push_back({{{y, 1.0}, {z, 1.0}}, Sense::GreaterEqual, 0.5, ""});
  p.rows.push_back({{{z, 1.0}}, Sense::GreaterEqual, 0.2, ""});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, 0.5 + 0.6 + 0.6, 1e-9);
  EXPECT_NEAR(s.x[y], 0.3, 1e-9);
}

TEST(Simplex, NegativeRightHandSide) {
  // min x s.t. -x <= -2.
  LinearProgram p;
  const auto x = p.add_variable("x", 1.0);
  p.rows.push_back({{{x, -1.0}}, Sense::LessEqual, -2.0, ""});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[x], 2.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  LinearProgram p;
  const auto x = p.add_variable("x", 1.0);
  p.rows.push_back({{{x, 1.0}}, Sense::LessEqual, 1.0, ""});
  p.rows.push_back({{{x, 1.0}}, Sense::GreaterEqual, 2.0, ""});
  EXPECT_EQ(solve(p).status, Status::Infeasible);
}

TEST(Simplex, Unbounded) {
  LinearProgram p;
  const auto x = p.add_variable("x", -1.0);
  const auto y = p.add_variable("y", 0.0);
  p.rows.push_back({{{x, 1.0}, {y, -1.0}}, Sense::LessEqual, 1.0, ""});
  EXPECT_EQ(solve(p).status, Status::Unbounded);
}

TEST(Simplex, DegenerateCycleExample) {
  // Beale's cycling example; needs anti-cycling to terminate.
  LinearProgram p;
  const auto x1 = p.add_variable("x1", -0.75);
  const auto x2 = p.add_variable("x2", 150.0);
  const auto x3 = p.add_variable("x3", -0.02);
  const auto x4 = p.add_variable("x4", 6.0);
  p.rows.push_back({{{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, Sense::LessEqual, 0.0, ""});
  p.rows.push_back({{{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, Sense::LessEqual, 0.0, ""});
  p.rows.push_back({{{x3, 1.0}}, Sense::LessEqual, 1.0, ""});
  Options opt;
  opt.degenerate_switch = 1;
  const auto s = solve(p, opt);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, -0.05, 1e-9);
}

TEST(Simplex, RandomFeasibleProgramsSatisfyConstraints) {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t nv = 2 + rng.uniform_index(6);
    const std::size_t nr = 1 + rng.uniform_index(6);
    LinearProgram p;
    for (std::size_t c = 0; c < nv; ++c) p.add_variable("x" + std::to_string(c), rng.uniform01() - 0.3);
    // Box the variables so every instance is bounded; x = 0 is feasible.
    for (std::size_t c = 0; c < nv; ++c) p.rows.push_back({{{c, 1.0}}, Sense::LessEqual, 1.0, ""});
    for (std::size_t r = 0; r < nr; ++r) {
      Row row;
      for (std::size_t c = 0; c < nv; ++c) row.coeffs.emplace_back(c, rng.uniform01() * 2 - 1);
      row.rhs = rng.uniform01();
      p.rows.push_back(row);
    }
    const auto s = solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    double obj = 0.0;
    for (std::size_t c = 0; c < nv; ++c) {
      EXPECT_GE(s.x[c], -1e-9);
      obj += p.objective[c] * s.x[c];
    }
    EXPECT_NEAR(obj, s.objective, 1e-9);
    for (const auto& row : p.rows) {
      double lhs = 0.0;
      for (const auto& [c, v] : row.coeffs) lhs += v * s.x[c];
      EXPECT_LE(lhs, row.rhs + 1e-9);
    }
    // No vertex of the box beats the optimum along a single coordinate flip.
    EXPECT_LE(s.objective, 1e-12);
  }
}

// Simplex-weighted epigraph programs with many zero right-hand sides.
TEST(Simplex, DegenerateEpigraphProgramsIndependentOfRebuildInterval) {
  Rng rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t nq = 5 + rng.uniform_index(20);
    const std::size_t nt = 2 + rng.uniform_index(6);
    LinearProgram p;
    for (std::size_t j = 0; j < nq; ++j) p.add_variable("q" + std::to_string(j), 0.0);
    for (std::size_t k = 0; k < nt; ++k) p.add_variable("t" + std::to_string(k), 1.0);
    Row total;
    for (std::size_t j = 0; j < nq; ++j) total.coeffs.emplace_back(j, 1.0);
    total.sense = Sense::Equal;
    total.rhs = 1.0;
    p.rows.push_back(total);
    for (std::size_t k = 0; k < nt; ++k) {
      for (int d = 0; d < 6; ++d) {
        Row row;
        for (std::size_t j = 0; j < nq; ++j) {
          const double a = 0.5 * (static_cast<double>(rng.uniform_index(5)) - 2.0);
          if (a != 0.0) row.coeffs.emplace_back(j, a);
        }
        row.coeffs.emplace_back(nq + k, -1.0);
        p.rows.push_back(row);
      }
    }
    Options every_pivot;
    every_pivot.reinvert_every = 1;
    Options never;
    never.reinvert_every = 1000000;
    const auto a = solve(p);
    const auto b = solve(p, every_pivot);
    const auto c = solve(p, never);
    ASSERT_EQ(a.status, Status::Optimal);
    ASSERT_EQ(b.status, Status::Optimal);
    ASSERT_EQ(c.status, Status::Optimal);
    EXPECT_NEAR(a.objective, b.objective, 1e-10);
    EXPECT_NEAR(a.objective, c.objective, 1e-10);
    EXPECT_GE(a.objective, 0.0);
    for (double x : a.x) EXPECT_GE(x, 0.0);
    for (const auto& row : p.rows) {
      double lhs = 0.0;
      for (const auto& [j, v] : row.coeffs) lhs += v * a.x[j];
      if (row.sense == Sense::Equal) {
        EXPECT_NEAR(lhs, row.rhs, 1e-10);
      } else {
        EXPECT_LE(lhs, row.rhs + 1e-10);
      }
    }
  }
}

TEST(LpFormat, WritesSections) {
  LinearProgram p;
  const auto x = p.add_variable("x", 1.0);
  const auto y = p.add_variable("y", -2.0);
  p.rows.push_back({{{x, 1.0}, {y, -1.0}}, Sense::GreaterEqual, 0.5, "r1"});
  p.rows.push_back({{{y, 1.0}}, Sense::Equal, 1.0, ""});
  std::ostringstream out;
  write_lp_format(out, p);
  EXPECT_EQ(out.str(), "Minimize\n obj: 1 x - 2 y\nSubject To\n r1: 1 x - 1 y >= 0.5\n c1: 1 y = 1\nEnd\n");
}

}  // namespace
}  // namespace bce::lp
