#pragma once

// Random instance generators and brute-force reference computations shared by
// the unit tests and the acceptance binary. Nothing here calls the solver.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qopp/interval.hpp"
#include "qopp/lp2d.hpp"
#include "qopp/problem.hpp"

namespace qopp::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::mt19937_64 engine_;
};

struct RandomProblemOptions {
  std::size_t min_steps = 1;
  std::size_t max_steps = 30;
  std::size_t max_rows = 5;
  bool costs = false;
};

/// A problem built around a hidden reference profile so that it is feasible
/// by construction. Every step carries an upper bound on x so TOPP is bounded;
/// the remaining rows mix a, b, c randomly with one- or two-sided bounds that
/// hold at the reference with random slack.
inline DiscretizedProblem random_feasible_problem(Rng& rng, const RandomProblemOptions& opt) {
  const std::size_t N = rng.index(opt.min_steps, opt.max_steps);
  DiscretizedProblem p;
  p.delta_s.resize(N);
  for (double& ds : p.delta_s) ds = rng.uniform(0.05, 0.5);
  p.uniform_delta_s = false;

  std::vector<double> x(N + 1);
  for (double& v : x) v = rng.uniform(0.05, 1.0);
  std::vector<double> u(N + 1, 0.0);
  for (std::size_t k = 0; k < N; ++k) u[k] = (x[k + 1] - x[k]) / (2.0 * p.delta_s[k]);

  p.steps.resize(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    DiscretizedStep& step = p.steps[k];
    step.add_row(0.0, 1.0, 0.0, -kInf, x[k] + rng.uniform(0.0, 0.5));
    const std::size_t extra = rng.index(0, opt.max_rows - 1);
    for (std::size_t i = 0; i < extra; ++i) {
      const double a = rng.uniform(-1.0, 1.0);
      const double b = rng.uniform(-1.0, 1.0);
      const double c = rng.uniform(-0.2, 0.2);
      const double v = a * u[k] + b * x[k] + c;
      const double lo = rng.coin(0.4) ? v - rng.uniform(0.0, 0.3) : -kInf;
      const double hi = rng.coin(0.8) || lo == -kInf ? v + rng.uniform(0.0, 0.3) : kInf;
      step.add_row(a, b, c, lo, hi);
    }
  }
  p.boundary.x0 = rng.coin() ? Interval::Point(x[0]) : Interval{0.0, x[0] + rng.uniform(0.0, 0.3)};
  p.boundary.xN = rng.coin() ? Interval::Point(x[N]) : Interval{0.0, x[N] + rng.uniform(0.0, 0.3)};

  if (opt.costs) {
    std::vector<QuadraticStepCost> costs(N + 1);
    for (QuadraticStepCost& c : costs) {
      c.Q = rng.uniform(0.1, 2.0);
      c.R = rng.uniform(0.1, 2.0);
      c.Ncross = rng.uniform(-0.9, 0.9) * 2.0 * std::sqrt(c.Q * c.R);
      c.x_des = rng.uniform(0.0, 1.5);
      c.u_des = rng.uniform(-1.0, 1.0);
      c.lin_x = rng.uniform(-0.2, 0.2);
      c.lin_u = rng.uniform(-0.2, 0.2);
      c.offset = rng.uniform(-1.0, 1.0);
    }
    p.costs = std::move(costs);
  }
  return p;
}

/// Range of y over the polygon by intersecting every pair of boundary lines
/// (rows and box edges) and keeping feasible points. Bounded inputs only.
inline Interval brute_force_y_range(std::span<const lp2d::Halfplane2> rows, const Interval& xb,
                                    const Interval& yb) {
  std::vector<lp2d::Halfplane2> all(rows.begin(), rows.end());
  all.push_back({1.0, 0.0, xb.hi});
  all.push_back({-1.0, 0.0, -xb.lo});
  all.push_back({0.0, 1.0, yb.hi});
  all.push_back({0.0, -1.0, -yb.lo});
  Interval out = Interval::Empty();
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const double det = all[i].alpha * all[j].beta - all[i].beta * all[j].alpha;
      if (std::abs(det) < 1e-14) continue;
      const double x = (all[i].gamma * all[j].beta - all[i].beta * all[j].gamma) / det;
      const double y = (all[i].alpha * all[j].gamma - all[i].gamma * all[j].alpha) / det;
      bool ok = true;
      for (const auto& h : all) {
        const double scale = 1.0 + std::abs(h.alpha * x) + std::abs(h.beta * y) + std::abs(h.gamma);
        if (h.alpha * x + h.beta * y > h.gamma + 1e-11 * scale) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      out = out.empty() ? Interval::Point(y) : Interval{std::min(out.lo, y), std::max(out.hi, y)};
    }
  }
  return out;
}

/// Convex hull (Andrew's monotone chain), counter-clockwise, collinear
/// points dropped.
inline std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-12) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  return hull;
}

/// Images W t of every vertex of the tension box.
inline std::vector<Eigen::Vector2d> box_vertex_images(const Eigen::MatrixXd& W,
                                                      const Eigen::VectorXd& lo,
                                                      const Eigen::VectorXd& hi) {
  const auto m = static_cast<std::size_t>(W.cols());
  std::vector<Eigen::Vector2d> out;
  out.reserve(std::size_t{1} << m);
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    Eigen::VectorXd t(W.cols());
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      t[jj] = (mask >> j) & 1 ? hi[jj] : lo[jj];
    }
    out.push_back(W * t);
  }
  return out;
}

/// Largest distance from any point of a to its nearest point in b, both ways.
inline double point_set_distance(const std::vector<Eigen::Vector2d>& a,
                                 const std::vector<Eigen::Vector2d>& b) {
  auto one_way = [](const auto& from, const auto& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = kInf;
      for (const auto& q : to) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.empty() || b.empty()) return a.size() == b.size() ? 0.0 : kInf;
  return std::max(one_way(a, b), one_way(b, a));
}

/// Integral of 1 / sdot over s for the constant-acceleration profile, by the
/// composite midpoint rule with `refine` subintervals per step. sdot^2 is
/// linear in s inside a step.
inline double quadrature_duration(std::span<const double> x, std::span<const double> ds,
                                  std::size_t refine) {
  double T = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const double h = ds[k] / static_cast<double>(refine);
    for (std::size_t j = 0; j < refine; ++j) {
      const double w = (static_cast<double>(j) + 0.5) / static_cast<double>(refine);
      T += h / std::sqrt(x[k] + w * (x[k + 1] - x[k]));
    }
  }
  return T;
}

/// Minimum of a one-dimensional function on [lo, hi]: coarse grid then
/// golden-section refinement around the best grid point.
template <typename F>
double grid_minimize(F&& f, double lo, double hi, std::size_t grid = 400) {
  std::size_t best = 0;
  double best_v = kInf;
  const double h = (hi - lo) / static_cast<double>(grid);
  for (std::size_t i = 0; i <= grid; ++i) {
    const double v = f(lo + h * static_cast<double>(i));
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = std::max(lo, lo + h * (static_cast<double>(best) - 1.0));
  double b = std::min(hi, lo + h * (static_cast<double>(best) + 1.0));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::min(best_v, f(0.5 * (a + b)));
}

/// |a - b|, with equal infinities counting as zero.
inline double endpoint_gap(double a, double b) { return a == b ? 0.0 : std::abs(a - b); }

}  // namespace qopp::testing
