#include <gtest/gtest.h>

#include <vector>

#include "qopp/elimination.hpp"
#include "qopp/errors.hpp"
#include "qopp/generators.hpp"
#include "qopp/oracle.hpp"
#include "support.hpp"

namespace qopp {
namespace {

DiscretizedProblem empty_problem(std::size_t N, double ds) {
  DiscretizedProblem p;
  p.steps.resize(N + 1);
  set_uniform_spacing(p, ds);
  return p;
}

TEST(EliminateU, BenchmarkRowSubstitution) {
  DiscretizedStep step;
  step.add_row(1.0, 0.0, 0.0, -kInf, 0.1);
  const ReducedRows r = reduce_rows(step, 0.25);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(r.rows[0].alpha, -2.0);
  EXPECT_DOUBLE_EQ(r.rows[0].beta, 2.0);
  EXPECT_DOUBLE_EQ(r.rows[0].gamma, 0.1);
  EXPECT_EQ(r.source[0], 0u);
}

TEST(EliminateU, TwoSidedRowGivesTwoHalfplanes) {
  DiscretizedStep step;
  step.add_row(1.0, 1.0, 0.5, -1.0, 1.0);
  const ReducedRows r = reduce_rows(step, 0.5);
  EXPECT_EQ(r.rows.size(), 2u);
}

TEST(EliminateU, ReducedCostWeights) {
  const pwq::BivariateQuadratic q = reduce_cost({1.0, 1.0, 0.0}, 0.5);
  // Q' = 2, R' = 1, N' = -2 in x^2, y^2, x*y form.
  EXPECT_DOUBLE_EQ(q.p, 4.0);
  EXPECT_DOUBLE_EQ(q.r, 2.0);
  EXPECT_DOUBLE_EQ(q.n, -2.0);
}

TEST(EliminateU, EqualStatesGiveZeroAcceleration) {
  EXPECT_EQ(eliminate_u(3, 0.1)(0.7, 0.7), 0.0);
}

TEST(EliminateXTopp, BenchmarkReach) {
  const DiscretizedProblem p = gen::simple_benchmark(2);
  ToppStepResult s0 = eliminate_x_topp(0, reduce_rows(p.steps[0], 0.25), Interval::Point(0.0), 0.0);
  EXPECT_DOUBLE_EQ(s0.next_reach.lo, 0.0);
  EXPECT_DOUBLE_EQ(s0.next_reach.hi, 0.05);
  ToppStepResult s1 = eliminate_x_topp(1, reduce_rows(p.steps[1], 0.25), s0.next_reach, 0.0);
  EXPECT_DOUBLE_EQ(s1.next_reach.lo, 0.0);
  EXPECT_DOUBLE_EQ(s1.next_reach.hi, 0.075);
}

TEST(EliminateXTopp, EmptyIncomingThrows) {
  EXPECT_THROW(eliminate_x_topp(4, {}, Interval::Empty(), 0.0), Infeasible);
}

TEST(Solve, BenchmarkTwoSteps) {
  const SolutionProfile s = solve(gen::simple_benchmark(2));
  ASSERT_EQ(s.x.size(), 3u);
  EXPECT_NEAR(s.x[0], 0.0, 1e-15);
  EXPECT_NEAR(s.x[1], 0.05, 1e-15);
  EXPECT_NEAR(s.x[2], 0.075, 1e-15);
  EXPECT_NEAR(s.u[0], 0.1, 1e-15);
  EXPECT_NEAR(s.u[1], 0.05, 1e-15);
  const std::vector<Interval> reach = {{0.0, 0.0}, {0.0, 0.05}, {0.0, 0.075}};
  ASSERT_EQ(s.diagnostics.reach.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(s.diagnostics.reach[k].lo, reach[k].lo, 1e-15);
    EXPECT_NEAR(s.diagnostics.reach[k].hi, reach[k].hi, 1e-15);
  }
}

TEST(Solve, NoRowsTerminalBound) {
  DiscretizedProblem p = empty_problem(1, 0.5);
  p.boundary.xN = {0.0, 1.0};
  EXPECT_DOUBLE_EQ(solve(p).x.back(), 1.0);
}

TEST(Solve, NoRowsLongerHorizonIsUnbounded) {
  DiscretizedProblem p = empty_problem(3, 0.5);
  p.boundary.xN = {0.0, 1.0};
  EXPECT_THROW(solve(p), Unbounded);
}

TEST(Solve, QuadraticZeroTargetIsZero) {
  DiscretizedProblem p = empty_problem(5, 0.2);
  p.boundary.xN = Interval::AtLeast(0.0);
  p.costs = std::vector<QuadraticStepCost>(6, QuadraticStepCost{1.0, 1.0, 0.0});
  const SolutionProfile s = solve(p);
  for (double x : s.x) EXPECT_NEAR(x, 0.0, 1e-14);
  EXPECT_NEAR(*s.objective_value, 0.0, 1e-14);
}

TEST(Solve, ZeroCostsGiveFlatValue) {
  DiscretizedProblem p = gen::simple_benchmark(4);
  p.costs = std::vector<QuadraticStepCost>(5);
  const BayesNet net = eliminate(p, Objective::kQuadratic);
  ASSERT_TRUE(net.terminal_cost.has_value());
  const pwq::PiecewiseQuadratic& v = *net.terminal_cost;
  for (const pwq::Quadratic& q : v.segments()) {
    EXPECT_EQ(q.a, 0.0);
    EXPECT_EQ(q.b, 0.0);
    EXPECT_EQ(q.c, 0.0);
  }
  const Residuals r = residuals(p, solve(p).x, solve(p).u);
  EXPECT_LE(r.max_row_violation, 1e-12);
}

TEST(Solve, SingleStepQuadraticConditional) {
  DiscretizedProblem p = empty_problem(1, 0.5);
  p.boundary = {Interval::AtLeast(0.0), Interval::AtLeast(0.0)};
  QuadraticStepCost c0{1.0, 1.0, 0.0, 1.0, 0.0};
  QuadraticStepCost c1{1.0, 0.0, 0.0, 1.0, 0.0};
  p.costs = std::vector<QuadraticStepCost>{c0, c1};
  const BayesNet net = eliminate(p);
  for (double y : {0.0, 0.5, 2.0, 7.0}) {
    EXPECT_NEAR(pwq::evaluate(net.qopp[0].conditional, y), 0.5 * (1.0 + y), 1e-14);
  }
  const SolutionProfile s = backsubstitute(net, p);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
  EXPECT_NEAR(s.x[1], 1.0, 1e-12);
}

TEST(Solve, ReportsInfeasibleStep) {
  DiscretizedProblem p = gen::simple_benchmark(10);
  p.steps[5].add_row(0.0, 1.0, 0.0, -kInf, -0.5);
  try {
    solve(p);
    FAIL() << "expected Infeasible";
  } catch (const Infeasible& e) {
    EXPECT_EQ(e.step(), 5u);
    EXPECT_FALSE(e.rows().empty());
  }
}

TEST(Solve, QuadraticWithoutCostsIsInvalid) {
  EXPECT_THROW(solve(gen::simple_benchmark(3), Objective::kQuadratic), InvalidProblem);
}

TEST(Solve, BenchmarkMatchesOracles) {
  const DiscretizedProblem topp = gen::simple_benchmark(30);
  const SolutionProfile a = solve(topp);
  const SolutionProfile b = oracle::topp_oracle(topp);
  for (std::size_t k = 0; k <= 30; ++k) EXPECT_NEAR(a.x[k], b.x[k], 1e-7);

  const DiscretizedProblem qopp = gen::simple_benchmark(10, true);
  const SolutionProfile c = solve(qopp);
  const SolutionProfile d = oracle::qopp_oracle(qopp);
  for (std::size_t k = 0; k <= 10; ++k) EXPECT_NEAR(c.x[k], d.x[k], 1e-6);
}

TEST(Solve, QuadraticBenchmarkStaysAtRest) {
  // x = u = 0 is optimal; the cost-to-arrive accumulates one ever narrower
  // segment per step below the reach cap.
  const DiscretizedProblem p30 = gen::simple_benchmark(30, true);
  const SolutionProfile a = solve(p30);
  const SolutionProfile b = oracle::qopp_oracle(p30);
  for (std::size_t k = 0; k <= 30; ++k) EXPECT_NEAR(a.x[k], b.x[k], 1e-10);

  const SolutionProfile big = solve(gen::simple_benchmark(2000, true));
  EXPECT_NEAR(*big.objective_value, 0.0, 1e-12);
  for (double x : big.x) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(Solve, Thousand) {
  const SolutionProfile s = solve(gen::simple_benchmark(1000));
  const SolutionProfile head = oracle::topp_oracle(gen::simple_benchmark(30));
  // On this instance the greedy profile is the upper reach bound, which does
  // not depend on N.
  for (std::size_t k = 0; k < 20; ++k) EXPECT_NEAR(s.x[k], head.x[k], 1e-7);
  EXPECT_LE(s.diagnostics.max_row_violation, 1e-9);
}

// ---------------------------------------------------------------------------

TEST(EliminationProperty, ToppMatchesLexicographicOracle) {
  testing::Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const DiscretizedProblem p = testing::random_feasible_problem(rng, {1, 20, 5, false});
    const SolutionProfile s = solve(p);
    const SolutionProfile o = oracle::topp_oracle(p);
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      ASSERT_NEAR(s.x[k], o.x[k], 1e-7) << "trial " << trial << " k " << k;
    }
    EXPECT_LE(s.diagnostics.max_row_violation, 1e-9);
    EXPECT_LE(s.diagnostics.max_dynamics_residual, 1e-12);
  }
}

TEST(EliminationProperty, QoppNotWorseThanOracle) {
  testing::Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const DiscretizedProblem p = testing::random_feasible_problem(rng, {1, 10, 4, true});
    const SolutionProfile s = solve(p);
    const SolutionProfile o = oracle::qopp_oracle(p);
    EXPECT_LE(*s.objective_value, *o.objective_value + 1e-8) << "trial " << trial;
    EXPECT_LE(s.diagnostics.max_row_violation, 1e-9);
    EXPECT_LE(s.diagnostics.max_dynamics_residual, 1e-12);
  }
}

TEST(EliminationProperty, ReachIsObjectiveIndependent) {
  testing::Rng rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    const DiscretizedProblem p = testing::random_feasible_problem(rng, {1, 15, 5, true});
    const BayesNet a = eliminate(p, Objective::kTopp);
    const BayesNet b = eliminate(p, Objective::kQuadratic);
    ASSERT_EQ(a.reach.size(), b.reach.size());
    for (std::size_t k = 0; k < a.reach.size(); ++k) EXPECT_EQ(a.reach[k], b.reach[k]);
  }
}

TEST(EliminationProperty, ReachMatchesProjection) {
  testing::Rng rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const DiscretizedProblem p = testing::random_feasible_problem(rng, {1, 10, 5, false});
    const std::vector<Interval> want = oracle::reach_oracle(p);
    const std::vector<Interval> got = eliminate(p).reach;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_LE(testing::endpoint_gap(got[k].lo, want[k].lo), 1e-8) << "trial " << trial << " k " << k;
      EXPECT_LE(testing::endpoint_gap(got[k].hi, want[k].hi), 1e-8) << "trial " << trial << " k " << k;
    }
  }
}

/// Rows whose reduced form has at most one positive coefficient keep the
/// feasible set closed under componentwise max, so the greedy profile is the
/// largest feasible value of every coordinate.
DiscretizedProblem lattice_problem(testing::Rng& rng, std::size_t N) {
  DiscretizedProblem p = empty_problem(N, rng.uniform(0.01, 0.05));
  p.boundary.xN = Interval::AtLeast(0.0);
  for (auto& step : p.steps) {
    step.add_row(0.0, 1.0, 0.0, -kInf, rng.uniform(0.5, 2.0));
    for (std::size_t i = rng.index(0, 3); i > 0; --i) {
      step.add_row(rng.uniform(0.1, 1.0), rng.uniform(-1.0, 1.0), 0.0, rng.uniform(-2.0, -0.5),
                   rng.uniform(0.05, 1.0));
    }
  }
  return p;
}

TEST(EliminationProperty, GreedyMaximizesEveryCoordinate) {
  testing::Rng rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t N = rng.index(1, 12);
    const DiscretizedProblem p = lattice_problem(rng, N);
    const SolutionProfile s = solve(p);
    const oracle::DenseInstance inst = oracle::make_dense(p);
    oracle::LinearProgram lp{inst.A_eq, inst.b_eq, inst.A_in, inst.b_in,
                             Eigen::VectorXd::Constant(static_cast<Eigen::Index>(inst.vars()), -kInf)};
    for (std::size_t k = 0; k <= N; ++k) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.vars()));
      c[static_cast<Eigen::Index>(oracle::DenseInstance::x(k))] = -1.0;
      const oracle::LexResult r = oracle::solve_lexicographic(lp, {c});
      ASSERT_EQ(r.status, oracle::LpStatus::kOptimal);
      EXPECT_NEAR(s.x[k], -r.values[0], 1e-8) << "trial " << trial << " k " << k;
    }
  }
}

TEST(EliminationProperty, Deterministic) {
  testing::Rng rng(46);
  const DiscretizedProblem p = testing::random_feasible_problem(rng, {20, 20, 5, true});
  const SolutionProfile a = solve(p);
  const SolutionProfile b = solve(p);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(*a.objective_value, *b.objective_value);
}

}  // namespace
}  // namespace qopp
