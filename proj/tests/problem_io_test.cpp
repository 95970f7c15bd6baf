#include <gtest/gtest.h>

#include <string>

#include "qopp/errors.hpp"
#include "qopp/generators.hpp"
#include "qopp/problem_io.hpp"
#include "support.hpp"

namespace qopp {
namespace {

void expect_same(const DiscretizedProblem& a, const DiscretizedProblem& b) {
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    EXPECT_EQ(a.steps[k].a, b.steps[k].a);
    EXPECT_EQ(a.steps[k].b, b.steps[k].b);
    EXPECT_EQ(a.steps[k].c, b.steps[k].c);
    EXPECT_EQ(a.steps[k].lo, b.steps[k].lo);
    EXPECT_EQ(a.steps[k].hi, b.steps[k].hi);
  }
  EXPECT_EQ(a.delta_s, b.delta_s);
  EXPECT_EQ(a.boundary.x0, b.boundary.x0);
  EXPECT_EQ(a.boundary.xN, b.boundary.xN);
  EXPECT_EQ(a.x_floor, b.x_floor);
  ASSERT_EQ(a.has_costs(), b.has_costs());
  if (!a.has_costs()) return;
  for (std::size_t k = 0; k < a.costs->size(); ++k) {
    const QuadraticStepCost& x = (*a.costs)[k];
    const QuadraticStepCost& y = (*b.costs)[k];
    EXPECT_EQ(x.Q, y.Q);
    EXPECT_EQ(x.R, y.R);
    EXPECT_EQ(x.Ncross, y.Ncross);
    EXPECT_EQ(x.x_des, y.x_des);
    EXPECT_EQ(x.u_des, y.u_des);
    EXPECT_EQ(x.lin_x, y.lin_x);
    EXPECT_EQ(x.lin_u, y.lin_u);
    EXPECT_EQ(x.offset, y.offset);
  }
}

TEST(ProblemIo, RoundTripPresets) {
  const DiscretizedProblem presets[] = {
      gen::simple_benchmark(7), gen::simple_benchmark(7, true),
      gen::kinematic_limits(gen::circle_path(9), Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 2)),
      gen::cable_robot_problem(gen::star_cable_robot(12))};
  for (const DiscretizedProblem& p : presets) {
    const std::string text = io::dump_problem(p);
    const DiscretizedProblem q = io::parse_problem(text);
    expect_same(p, q);
    EXPECT_EQ(io::dump_problem(q), text);
  }
}

TEST(ProblemIo, RoundTripRandom) {
  testing::Rng rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    const DiscretizedProblem p = testing::random_feasible_problem(rng, {1, 10, 5, rng.coin()});
    const DiscretizedProblem q = io::parse_problem(io::dump_problem(p));
    expect_same(p, q);
  }
}

TEST(ProblemIo, NullIsInfinity) {
  const DiscretizedProblem p = io::parse_problem(R"({
    "delta_s": 0.5,
    "steps": [{"a": [1], "b": [0], "c": [0], "lo": [null], "hi": [null]},
              {"a": [], "b": [], "c": [], "lo": [], "hi": []}],
    "boundary": {"x0": [0, null]}
  })");
  EXPECT_EQ(p.steps[0].lo[0], -kInf);
  EXPECT_EQ(p.steps[0].hi[0], kInf);
  EXPECT_EQ(p.boundary.x0, Interval::AtLeast(0.0));
  EXPECT_EQ(p.boundary.xN, Interval::Point(0.0));
  EXPECT_EQ(p.delta_s, (std::vector<double>{0.5}));
  EXPECT_FALSE(p.has_costs());
}

TEST(ProblemIo, OptionalCostFieldsDefaultToZero) {
  const DiscretizedProblem p = io::parse_problem(R"({
    "delta_s": [0.5],
    "steps": [{"a": [], "b": [], "c": [], "lo": [], "hi": []},
              {"a": [], "b": [], "c": [], "lo": [], "hi": []}],
    "costs": [{"Q": 1, "R": 2, "N": 0}, {"Q": 1, "R": 0, "N": 0, "x_des": 3, "const": 4}]
  })");
  ASSERT_TRUE(p.has_costs());
  EXPECT_EQ((*p.costs)[0].x_des, 0.0);
  EXPECT_EQ((*p.costs)[1].x_des, 3.0);
  EXPECT_EQ((*p.costs)[1].offset, 4.0);
  EXPECT_FALSE(p.uniform_delta_s);
}

void expect_parse_error(const std::string& text, const std::string& where) {
  try {
    io::parse_problem(text);
    FAIL() << "expected ParseError for " << text;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
  }
}

TEST(ProblemIo, Errors) {
  expect_parse_error("{", "malformed JSON");
  expect_parse_error(R"({"steps": []})", "delta_s");
  expect_parse_error(R"({"delta_s": 1, "steps": [], "extra": 1})", "extra");
  expect_parse_error(R"({"delta_s": 1, "steps": [{"a": [1], "b": [1], "c": [1], "lo": [0]}]})",
                     "$.steps[0]");
  expect_parse_error(
      R"({"delta_s": 1, "steps": [{"a": [1], "b": ["x"], "c": [1], "lo": [0], "hi": [1]}]})",
      "$.steps[0].b[0]");
  expect_parse_error(R"({"delta_s": 1, "steps": [], "boundary": {"x0": [0]}})", "$.boundary.x0");
}

TEST(ProblemIo, PathRoundTrip) {
  const PathSamples path = gen::circle_path(6);
  const PathSamples back = io::parse_path(io::dump_path(path));
  EXPECT_EQ(back.grid, path.grid);
  for (std::size_t k = 0; k < path.samples(); ++k) {
    EXPECT_EQ(back.q[k], path.q[k]);
    EXPECT_EQ(back.dq_ds[k], path.dq_ds[k]);
  }
  const PathSamples bare = io::parse_path(R"({"grid": [0, 1], "q": [[0], [2]]})");
  EXPECT_EQ(bare.dq_ds[1].size(), 1);
}

TEST(ProblemIo, SolutionDocument) {
  const DiscretizedProblem p = gen::simple_benchmark(2);
  io::SolutionDocument doc;
  doc.profile = solve(p);
  doc.timing = compute_timing(doc.profile, p.delta_s);
  const std::string text = io::dump_solution(doc);
  EXPECT_NE(text.find("\"status\": \"ok\""), std::string::npos);
  EXPECT_NE(text.find("\"duration\": 3.24115"), std::string::npos);
  EXPECT_EQ(text.find("reach"), std::string::npos);

  doc.timing.reset();
  doc.untraversable_interval = 0;
  const std::string stuck = io::dump_solution(doc);
  EXPECT_NE(stuck.find("\"duration\": null"), std::string::npos);
  EXPECT_NE(stuck.find("untraversable_interval"), std::string::npos);
}

TEST(ProblemIo, InfeasibleDocument) {
  const std::string text = io::dump_infeasible(Infeasible(5, {0, 2}, "infeasible at step 5"));
  EXPECT_NE(text.find("\"status\": \"infeasible\""), std::string::npos);
  EXPECT_NE(text.find("\"step\": 5"), std::string::npos);
}

}  // namespace
}  // namespace qopp
