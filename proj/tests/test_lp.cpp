#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "bstar/lp.hpp"
#include "oracles.hpp"

namespace bstar {
namespace {

TEST(SolveLp, SingleLowerBound) {
  LPBuilder b;
  const int x = b.add_variable(-kInf, kInf, 1.0);
  b.add_le({{x, -1.0}}, -1.0);  // x >= 1
  const LPSolution s = solve_lp(b.build());
  ASSERT_EQ(s.status, LPStatus::kOptimal);
  EXPECT_NEAR(s.z[0], 1.0, 1e-12);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(SolveLp, ContradictoryBoundsAreInfeasible) {
  LPBuilder b;
  const int x = b.add_variable(-kInf, kInf, 1.0);
  b.add_le({{x, 1.0}}, 0.0);
  b.add_le({{x, -1.0}}, -1.0);
  EXPECT_EQ(solve_lp(b.build()).status, LPStatus::kInfeasible);
}

TEST(SolveLp, DetectsUnbounded) {
  LPBuilder b;
  const int x = b.add_variable(0.0, kInf, -1.0);
  const int y = b.add_variable(0.0, kInf, 0.0);
  b.add_le({{x, 1.0}, {y, -1.0}}, 1.0);
  EXPECT_EQ(solve_lp(b.build()).status, LPStatus::kUnbounded);
}

TEST(SolveLp, EqualityConstrainedTransport) {
  // Two sources (supply 3, 2), two sinks (demand 4, 1); cost matrix [[1, 4], [2, 1]].
  LPBuilder b;
  std::vector<int> v;
  const double cost[4] = {1, 4, 2, 1};
  for (int k = 0; k < 4; ++k) v.push_back(b.add_variable(0.0, kInf, cost[k]));
  b.add_eq({{v[0], 1}, {v[1], 1}}, 3);
  b.add_eq({{v[2], 1}, {v[3], 1}}, 2);
  b.add_eq({{v[0], 1}, {v[2], 1}}, 4);
  b.add_eq({{v[1], 1}, {v[3], 1}}, 1);
  const LPSolution s = solve_lp(b.build());
  ASSERT_EQ(s.status, LPStatus::kOptimal);
  // x00 = 3, x10 = 1, x11 = 1 -> 3 + 2 + 1.
  EXPECT_NEAR(s.objective, 6.0, 1e-10);
}

TEST(SolveLp, IterationCapReported) {
  LPBuilder b;
  for (int k = 0; k < 5; ++k) {
    const int x = b.add_variable(0.0, 10.0, -1.0 - k);
    b.add_le({{x, 1.0}}, 1.0 + k);
  }
  SimplexOptions opt;
  opt.max_iterations = 1;
  EXPECT_EQ(solve_lp(b.build(), opt).status, LPStatus::kIterationLimit);
}

TEST(SolveLp, MatchesVertexEnumerationOnRandomInstances) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 5;
    const int m = 8;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
    Eigen::VectorXd lo(n), hi(n), x0(n), c(n);
    for (int j = 0; j < n; ++j) {
      lo[j] = -1.0 - 0.5 * std::abs(u(rng));
      hi[j] = 1.0 + 0.5 * std::abs(u(rng));
      x0[j] = u(rng) * 2.0;
      c[j] = u(rng);
    }
    Eigen::VectorXd b = a * x0;
    for (int i = 0; i < m; ++i) b[i] += 0.65 * u(rng) + 0.35;

    LPBuilder builder;
    for (int j = 0; j < n; ++j) builder.add_variable(lo[j], hi[j], c[j]);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(j, a(i, j));
      builder.add_le(row, b[i]);
    }
    const LPProblem p = builder.build();
    const LPSolution s = solve_lp(p);
    const double oracle = testing::vertex_enumeration_min(c, a, b, lo, hi);
    if (oracle == kInf) {
      EXPECT_EQ(s.status, LPStatus::kInfeasible) << "instance " << inst;
      continue;
    }
    ++feasible;
    ASSERT_EQ(s.status, LPStatus::kOptimal) << "instance " << inst;
    EXPECT_NEAR(s.objective, oracle, 1e-8) << "instance " << inst;
    EXPECT_LE(max_violation(p, s.z), 1e-8);
    // Dual feasibility for a minimization with <= rows.
    EXPECT_LE(s.duals_ub.maxCoeff(), 1e-9);
  }
  EXPECT_GT(feasible, 100);
}

TEST(SolveLp, DeterministicForIdenticalInput) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LPBuilder b;
  for (int j = 0; j < 12; ++j) b.add_variable(-1.0, 1.0, u(rng));
  for (int i = 0; i < 20; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 12; ++j) row.emplace_back(j, u(rng));
    b.add_le(row, 0.5);
  }
  const LPProblem p = b.build();
  const LPSolution s1 = solve_lp(p);
  const LPSolution s2 = solve_lp(p);
  ASSERT_EQ(s1.status, LPStatus::kOptimal);
  EXPECT_EQ(s1.iterations, s2.iterations);
  for (int j = 0; j < 12; ++j) EXPECT_EQ(s1.z[j], s2.z[j]);
}

TEST(SolveLp, DegenerateCyclingExampleTerminates) {
  // Beale's classic cycling instance (cycles under naive Dantzig pricing).
  LPBuilder b;
  const int x1 = b.add_variable(0, kInf, -0.75);
  const int x2 = b.add_variable(0, kInf, 150);
  const int x3 = b.add_variable(0, kInf, -0.02);
  const int x4 = b.add_variable(0, kInf, 6);
  b.add_le({{x1, 0.25}, {x2, -60}, {x3, -0.04}, {x4, 9}}, 0);
  b.add_le({{x1, 0.5}, {x2, -90}, {x3, -0.02}, {x4, 3}}, 0);
  b.add_le({{x3, 1}}, 1);
  const LPSolution s = solve_lp(b.build());
  ASSERT_EQ(s.status, LPStatus::kOptimal);
  EXPECT_NEAR(s.objective, -0.05, 1e-10);
}

TEST(L1Epigraph, OneSidedBound) {
  LPBuilder b;
  const int x = b.add_variable(-kInf, kInf);
  b.add_le({{x, -1.0}}, -2.0);  // x >= 2
  const LPProblem p = l1_epigraph(b.build(), {{AffineExpr{{{x, 1.0}}, 0.0}, 1.0}});
  EXPECT_EQ(p.num_vars(), 2);
  const LPSolution s = solve_lp(p);
  ASSERT_EQ(s.status, LPStatus::kOptimal);
  EXPECT_NEAR(s.z[0], 2.0, 1e-12);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);
}

TEST(L1Epigraph, FreeVariableGoesToZero) {
  LPBuilder b;
  const int x = b.add_variable(-kInf, kInf);
  const LPSolution s = solve_lp(l1_epigraph(b.build(), {{AffineExpr{{{x, 1.0}}, 0.0}, 1.0}}));
  ASSERT_EQ(s.status, LPStatus::kOptimal);
  EXPECT_NEAR(s.z[0], 0.0, 1e-12);
  EXPECT_NEAR(s.objective, 0.0, 1e-12);
}

TEST(L1Epigraph, WeightedSumMatchesGridScan) {
  // minimize |x - 1| + 2 |x + 1| over [-3, 3].
  auto f = [](double x) { return std::abs(x - 1.0) + 2.0 * std::abs(x + 1.0); };
  double best_x = -3.0;
  double best = f(-3.0);
  for (int k = 0; k <= 60000; ++k) {
    const double x = -3.0 + 1e-4 * k;
    if (f(x) < best) {
      best = f(x);
      best_x = x;
    }
  }
  LPBuilder b;
  const int x = b.add_variable(-3.0, 3.0);
  const LPSolution s = solve_lp(l1_epigraph(
      b.build(), {{AffineExpr{{{x, 1.0}}, -1.0}, 1.0}, {AffineExpr{{{x, 1.0}}, 1.0}, 2.0}}));
  ASSERT_EQ(s.status, LPStatus::kOptimal);
  EXPECT_NEAR(s.z[0], best_x, 1e-4);
  EXPECT_NEAR(s.z[0], -1.0, 1e-10);
  EXPECT_NEAR(s.objective, best, 1e-4);
  EXPECT_NEAR(s.objective, 2.0, 1e-10);
}

TEST(L1Epigraph, RejectsNonPositiveWeight) {
  LPBuilder b;
  const int x = b.add_variable(-1.0, 1.0);
  EXPECT_THROW(l1_epigraph(b.build(), {{AffineExpr{{{x, 1.0}}, 0.0}, 0.0}}), InvalidInput);
  EXPECT_THROW(l1_epigraph(b.build(), {{AffineExpr{{{x, 1.0}}, 0.0}, -2.0}}), InvalidInput);
}

TEST(L1Epigraph, ObjectivePreservingForFixedOriginalVariables) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d fixed(u(rng), u(rng), u(rng));
    LPBuilder b;
    for (int j = 0; j < 3; ++j) b.add_variable(fixed[j], fixed[j]);
    std::vector<WeightedTerm> terms;
    double direct = 0.0;
    for (int k = 0; k < 4; ++k) {
      AffineExpr e{{{0, u(rng)}, {1, u(rng)}, {2, u(rng)}}, u(rng)};
      const double w = 0.1 + std::abs(u(rng));
      direct += w * std::abs(e.eval(fixed));
      terms.push_back({e, w});
    }
    const LPSolution s = solve_lp(l1_epigraph(b.build(), terms));
    ASSERT_EQ(s.status, LPStatus::kOptimal);
    EXPECT_NEAR(s.objective, direct, 1e-9);
  }
}

TEST(Elastic, HingeOnlyPricesViolation) {
  LPBuilder b;
  const int x = b.add_variable(-1.0, 1.0, -1.0);  // pushes x up
  add_elastic(b, AffineExpr{{{x, -1.0}}, 0.25}, 0.0, 10.0);  // want 0.25 - x >= 0
  const LPSolution s = solve_lp(b.build());
  ASSERT_EQ(s.status, LPStatus::kOptimal);
  EXPECT_NEAR(s.z[0], 0.25, 1e-12);
}

TEST(WriteLpText, ContainsSections) {
  LPBuilder b;
  const int x = b.add_variable(0.0, 4.0, 1.0, "x");
  const int y = b.add_variable(-kInf, kInf, -2.0, "y");
  b.add_le({{x, 1.0}, {y, 1.0}}, 3.0);
  b.add_eq({{x, 1.0}, {y, -1.0}}, 0.0);
  std::ostringstream os;
  write_lp_text(os, b.build());
  const std::string txt = os.str();
  EXPECT_NE(txt.find("Minimize"), std::string::npos);
  EXPECT_NE(txt.find("Subject To"), std::string::npos);
  EXPECT_NE(txt.find("y free"), std::string::npos);
  EXPECT_NE(txt.find("End"), std::string::npos);
}

}  // namespace
}  // namespace bstar
