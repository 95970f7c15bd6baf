#include <gtest/gtest.h>

#include <vector>

#include "qopp/lp2d.hpp"
#include "support.hpp"

namespace qopp {
namespace {

using lp2d::Halfplane2;
using lp2d::Row1;

TEST(Lp2d, BenchmarkStepRange) {
  const std::vector<Halfplane2> rows = {{-1.0, 2.0, 0.1}};
  const Interval y = lp2d::extremize_y(rows, {0.0, 0.05}, Interval::AtLeast(0.0));
  EXPECT_NEAR(y.lo, 0.0, 1e-15);
  EXPECT_NEAR(y.hi, 0.075, 1e-15);
}

TEST(Lp2d, BoxOnly) {
  const Interval y = lp2d::extremize_y({}, {0.0, 1.0}, {0.0, 1.0});
  EXPECT_EQ(y, (Interval{0.0, 1.0}));
}

TEST(Lp2d, ContradictoryRowsAreEmpty) {
  const std::vector<Halfplane2> rows = {{0.0, 1.0, 1.0}, {0.0, -1.0, -2.0}};
  EXPECT_TRUE(lp2d::extremize_y(rows, Interval::All(), Interval::All()).empty());
}

TEST(Lp2d, UnboundedDirectionIsInfinite) {
  const std::vector<Halfplane2> rows = {{-1.0, 1.0, 0.0}};
  const Interval y = lp2d::extremize_y(rows, Interval::AtLeast(0.0), Interval::All());
  EXPECT_EQ(y.lo, -kInf);
  EXPECT_EQ(y.hi, kInf);
}

TEST(Lp2d, ConstantRows) {
  const std::vector<Halfplane2> ok = {{0.0, 0.0, 1.0}};
  EXPECT_EQ(lp2d::extremize_y(ok, {0.0, 1.0}, {0.0, 2.0}), (Interval{0.0, 2.0}));
  const std::vector<Halfplane2> bad = {{0.0, 0.0, -1.0}};
  EXPECT_TRUE(lp2d::extremize_y(bad, {0.0, 1.0}, {0.0, 2.0}).empty());
}

TEST(Lp2d, Clamp1d) {
  EXPECT_EQ(lp2d::clamp_1d(std::vector<Row1>{{1.0, 0.1}, {-1.0, -0.05}}, Interval::AtLeast(0.0)),
            (Interval{0.05, 0.1}));
  EXPECT_TRUE(lp2d::clamp_1d(std::vector<Row1>{{0.0, -1.0}}, Interval::All()).empty());
}

TEST(Lp2d, Clamp1dBackSubstitutionStep) {
  // Benchmark rows for x_{N-1} once x_N = 0.075 is fixed: 2*0.075 - x <= 0.1.
  const Interval x = lp2d::clamp_1d(std::vector<Row1>{{-1.0, 0.1 - 0.15}}, {0.0, 0.05});
  EXPECT_NEAR(x.lo, 0.05, 1e-15);
  EXPECT_NEAR(x.hi, 0.05, 1e-15);
}

TEST(Lp2d, TinyContradictionCollapsesInsideBox) {
  const Interval x = lp2d::clamp_1d(std::vector<Row1>{{1.0, -1e-18}}, {0.0, 1.0});
  ASSERT_FALSE(x.empty());
  EXPECT_EQ(x.lo, 0.0);
  EXPECT_EQ(x.hi, 0.0);
}

std::vector<Halfplane2> random_rows(testing::Rng& rng, std::size_t m) {
  std::vector<Halfplane2> rows(m);
  for (auto& r : rows) {
    r.alpha = rng.uniform(-1.0, 1.0);
    r.beta = rng.uniform(-1.0, 1.0);
    r.gamma = rng.uniform(-0.3, 1.0);
  }
  return rows;
}

TEST(Lp2dProperty, MatchesVertexEnumeration) {
  testing::Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rows = random_rows(rng, rng.index(0, 20));
    const Interval xb{rng.uniform(-2.0, 0.0), rng.uniform(0.0, 2.0)};
    const Interval yb{rng.uniform(-2.0, 0.0), rng.uniform(0.0, 2.0)};
    const Interval got = lp2d::extremize_y(rows, xb, yb);
    const Interval want = testing::brute_force_y_range(rows, xb, yb);
    ASSERT_EQ(got.empty(), want.empty()) << "trial " << trial;
    if (got.empty()) continue;
    EXPECT_NEAR(got.lo, want.lo, 1e-10) << "trial " << trial;
    EXPECT_NEAR(got.hi, want.hi, 1e-10) << "trial " << trial;
  }
}

TEST(Lp2dProperty, AddingRowNeverWidens) {
  testing::Rng rng(12);
  const Interval box{-1.0, 1.0};
  for (int trial = 0; trial < 500; ++trial) {
    auto rows = random_rows(rng, rng.index(0, 10));
    const Interval before = lp2d::extremize_y(rows, box, box);
    rows.push_back(random_rows(rng, 1).front());
    const Interval after = lp2d::extremize_y(rows, box, box);
    if (after.empty()) continue;
    ASSERT_FALSE(before.empty());
    EXPECT_GE(after.lo, before.lo - 1e-12);
    EXPECT_LE(after.hi, before.hi + 1e-12);
  }
}

TEST(Lp2dProperty, SwappingRolesMatchesExtremizeX) {
  testing::Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const auto rows = random_rows(rng, rng.index(0, 12));
    std::vector<Halfplane2> swapped;
    for (const auto& r : rows) swapped.push_back({r.beta, r.alpha, r.gamma});
    const Interval xb{-1.0, rng.uniform(0.0, 2.0)};
    const Interval yb{rng.uniform(-2.0, 0.0), 1.5};
    const Interval a = lp2d::extremize_x(rows, xb, yb);
    const Interval b = lp2d::extremize_y(swapped, yb, xb);
    ASSERT_EQ(a.empty(), b.empty());
    if (a.empty()) continue;
    EXPECT_NEAR(a.lo, b.lo, 1e-12);
    EXPECT_NEAR(a.hi, b.hi, 1e-12);
  }
}

}  // namespace
}  // namespace qopp
