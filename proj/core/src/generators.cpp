#include "qopp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qopp/errors.hpp"

namespace qopp::gen {

namespace {

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

std::vector<double> uniform_grid(std::size_t N) {
  std::vector<double> grid(N + 1);
  for (std::size_t k = 0; k <= N; ++k) grid[k] = static_cast<double>(k) / static_cast<double>(N);
  grid.back() = 1.0;
  return grid;
}

void set_spacing_from_grid(DiscretizedProblem& problem, const std::vector<double>& grid) {
  problem.delta_s.resize(grid.size() - 1);
  bool uniform = true;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    problem.delta_s[k] = grid[k + 1] - grid[k];
    uniform = uniform && problem.delta_s[k] == problem.delta_s[0];
  }
  problem.uniform_delta_s = uniform;
}

}  // namespace

DiscretizedProblem simple_benchmark(std::size_t N, bool quadratic) {
  if (N == 0) throw InvalidProblem("simple benchmark needs N >= 1");
  DiscretizedProblem p;
  p.steps.resize(N + 1);
  for (DiscretizedStep& s : p.steps) s.add_row(1.0, 1.0, 0.0, -kInf, 0.1);
  set_uniform_spacing(p, 0.25);
  p.boundary.x0 = Interval::Point(0.0);
  p.boundary.xN = Interval::AtLeast(0.0);
  if (quadratic) {
    QuadraticStepCost c;
    c.Q = 1.0;
    c.R = 1.0;
    p.costs = std::vector<QuadraticStepCost>(N + 1, c);
  }
  return p;
}

PathSamples circle_path(std::size_t N, double radius) {
  if (N == 0) throw InvalidProblem("circle path needs N >= 1");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  PathSamples path;
  path.grid = uniform_grid(N);
  for (double s : path.grid) {
    const double c = std::cos(two_pi * s);
    const double sn = std::sin(two_pi * s);
    path.q.push_back(Eigen::Vector2d(radius * c, radius * sn));
    path.dq_ds.push_back(Eigen::Vector2d(-two_pi * radius * sn, two_pi * radius * c));
    path.d2q_ds2.push_back(
        Eigen::Vector2d(-two_pi * two_pi * radius * c, -two_pi * two_pi * radius * sn));
  }
  return path;
}

DiscretizedProblem kinematic_limits(const PathSamples& path, const Eigen::VectorXd& vmax,
                                    const Eigen::VectorXd& amax) {
  check_path(path);
  const auto n = static_cast<Eigen::Index>(path.dof());
  if (vmax.size() != n || amax.size() != n) {
    throw DimensionMismatch("vmax and amax need one entry per joint");
  }
  if ((vmax.array() < 0.0).any() || (amax.array() < 0.0).any() || !vmax.allFinite() ||
      !amax.allFinite()) {
    throw InvalidProblem("joint limits must be finite and non-negative");
  }
  const bool moves = std::any_of(path.dq_ds.begin(), path.dq_ds.end(),
                                 [](const Eigen::VectorXd& d) { return d.squaredNorm() > 0.0; });
  if (!moves) throw DegeneratePath("dq/ds vanishes at every sample; the path speed is unbounded");

  TaskConstraintSet task;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t k = 0; k < path.samples(); ++k) {
    SecondOrderSample so;
    so.A = I;
    so.B.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
    so.f = Eigen::VectorXd::Zero(n);
    so.lo = -amax;
    so.hi = amax;
    task.second_order.push_back(std::move(so));

    FirstOrderSample fo;
    fo.A = I;
    fo.f = Eigen::VectorXd::Zero(n);
    fo.lo = -vmax;
    fo.hi = vmax;
    task.first_order.push_back(std::move(fo));
  }
  BoundaryConditions rest;
  rest.x0 = Interval::Point(0.0);
  rest.xN = Interval::Point(0.0);
  return make_problem(path, task, rest);
}

std::vector<WrenchHalfplane> tension_polytope(const Eigen::MatrixXd& W,
                                              const Eigen::VectorXd& t_lo,
                                              const Eigen::VectorXd& t_hi) {
  if (W.rows() != 2) {
    throw UnsupportedDimension("only planar wrench matrices are supported, got " +
                               std::to_string(W.rows()) + " rows");
  }
  const Eigen::Index m = W.cols();
  if (t_lo.size() != m || t_hi.size() != m) {
    throw DimensionMismatch("tension bounds need one entry per cable");
  }
  if (!W.allFinite() || !t_lo.allFinite() || !t_hi.allFinite()) {
    throw NonFiniteCoefficient("wrench matrix and tension bounds must be finite");
  }
  if ((t_lo.array() > t_hi.array()).any()) throw InvalidProblem("tension bounds inverted");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(W);
  lu.setThreshold(1e-12);
  if (m < 2 || lu.rank() < 2) throw RankDeficient("wrench matrix has rank below 2");

  const Eigen::Vector2d center = W * (0.5 * (t_lo + t_hi));
  std::vector<Eigen::Vector2d> gens;
  const double scale = W.cwiseAbs().maxCoeff() * std::max(1.0, t_hi.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Vector2d g = W.col(j) * (0.5 * (t_hi[j] - t_lo[j]));
    if (g.norm() > 1e-15 * scale) gens.push_back(g);
  }

  std::vector<Eigen::Vector2d> normals;
  auto add = [&normals](Eigen::Vector2d n) {
    n.normalize();
    for (const Eigen::Vector2d& d : normals) {
      if (std::abs(cross(n, d)) <= 1e-12 && n.dot(d) > 0.0) return;
    }
    normals.push_back(n);
  };
  for (const Eigen::Vector2d& g : gens) {
    add(perp(g));
    add(-perp(g));
  }
  // A segment or a point needs end caps as well.
  if (normals.size() < 4) {
    for (const Eigen::Vector2d& g : gens) {
      add(g);
      add(-g);
    }
  }
  if (normals.size() < 4) {
    for (const Eigen::Vector2d& e : {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}) {
      add(e);
      add(-e);
    }
  }

  std::vector<WrenchHalfplane> out;
  out.reserve(normals.size());
  for (const Eigen::Vector2d& n : normals) {
    double offset = n.dot(center);
    for (const Eigen::Vector2d& g : gens) offset += std::abs(n.dot(g));
    out.push_back({n, offset});
  }
  std::sort(out.begin(), out.end(), [](const WrenchHalfplane& a, const WrenchHalfplane& b) {
    return std::atan2(a.normal.y(), a.normal.x()) < std::atan2(b.normal.y(), b.normal.x());
  });
  return out;
}

std::vector<Eigen::Vector2d> polygon_vertices(const std::vector<WrenchHalfplane>& halfplanes) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t m = halfplanes.size();
  for (std::size_t i = 0; i < m; ++i) {
    const WrenchHalfplane& a = halfplanes[i];
    const WrenchHalfplane& b = halfplanes[(i + 1) % m];
    const double det = cross(a.normal, b.normal);
    if (std::abs(det) <= 1e-15) continue;
    out.push_back({(a.offset * b.normal.y() - b.offset * a.normal.y()) / det,
                   (a.normal.x() * b.offset - b.normal.x() * a.offset) / det});
  }
  return out;
}

double wrench_margin(const std::vector<WrenchHalfplane>& halfplanes, const Eigen::Vector2d& F) {
  double margin = kInf;
  for (const WrenchHalfplane& h : halfplanes) margin = std::min(margin, h.slack(F));
  return margin;
}

QuadraticStepCost CableCostTerms::assemble() const {
  QuadraticStepCost c;
  c.Q = q + r * B.squaredNorm();
  c.R = r * A.squaredNorm();
  c.Ncross = 2.0 * r * A.dot(B);
  c.lin_x = -2.0 * q * x_d + 2.0 * r * B.dot(C);
  c.lin_u = 2.0 * r * A.dot(C);
  c.offset = q * x_d * x_d + r * C.squaredNorm();
  return c;
}

CableCostTerms cable_cost_terms(const CableRobotSpec& spec, std::size_t k) {
  const double speed2 = spec.velocity[k].squaredNorm();
  if (!(std::sqrt(speed2) > 1e-12)) {
    throw DegeneratePath("p'(s) vanishes at sample " + std::to_string(k) +
                         "; the speed target is undefined");
  }
  CableCostTerms t;
  t.q = spec.speed_weight * speed2 * speed2;
  t.x_d = spec.v_desired * spec.v_desired / speed2;
  t.r = spec.margin_weight;
  t.A = spec.A[k];
  t.B = spec.B[k];
  t.C = spec.f[k] - spec.W[k] * spec.t_mid();
  return t;
}

DiscretizedProblem cable_robot_problem(const CableRobotSpec& spec) {
  const std::size_t m = spec.samples();
  if (m < 2) throw DimensionMismatch("cable robot needs at least two samples");
  if (spec.position.size() != m || spec.velocity.size() != m ||
      spec.acceleration.size() != m || spec.W.size() != m || spec.A.size() != m ||
      spec.B.size() != m || spec.f.size() != m) {
    throw DimensionMismatch("cable robot arrays need one entry per sample");
  }
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (!(spec.grid[k] < spec.grid[k + 1])) {
      throw DimensionMismatch("cable robot grid must be strictly increasing");
    }
  }
  if (spec.speed_weight < 0.0 || spec.margin_weight < 0.0) {
    throw InvalidProblem("objective weights must be non-negative");
  }

  DiscretizedProblem p;
  p.steps.resize(m);
  std::vector<QuadraticStepCost> costs;
  costs.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const CableCostTerms terms = cable_cost_terms(spec, k);
    for (const WrenchHalfplane& h : tension_polytope(spec.W[k], spec.t_lo, spec.t_hi)) {
      p.steps[k].add_row(h.normal.dot(spec.A[k]), h.normal.dot(spec.B[k]),
                         h.normal.dot(spec.f[k]), -kInf, h.offset);
    }
    costs.push_back(terms.assemble());
  }
  p.costs = std::move(costs);
  p.boundary = spec.boundary;
  set_spacing_from_grid(p, spec.grid);
  return p;
}

Eigen::MatrixXd cable_wrench_matrix(const Eigen::Vector2d& p,
                                    const std::vector<Eigen::Vector2d>& anchors) {
  Eigen::MatrixXd W(2, static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    const Eigen::Vector2d d = anchors[j] - p;
    if (d.norm() == 0.0) throw DegeneratePath("end effector coincides with an anchor");
    W.col(static_cast<Eigen::Index>(j)) = d.normalized();
  }
  return W;
}

CableRobotSpec star_cable_robot(std::size_t N, const StarRobotOptions& o) {
  if (N == 0) throw InvalidProblem("star path needs N >= 1");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  CableRobotSpec spec;
  spec.grid = uniform_grid(N);
  const auto cables = static_cast<Eigen::Index>(o.anchors.size());
  spec.t_lo = Eigen::VectorXd::Constant(cables, o.t_min);
  spec.t_hi = Eigen::VectorXd::Constant(cables, o.t_max);
  spec.v_desired = o.v_desired;
  spec.speed_weight = o.speed_weight;
  spec.margin_weight = o.margin_weight;
  spec.boundary.x0 = Interval::Point(0.0);
  spec.boundary.xN = Interval::Point(0.0);

  for (double s : spec.grid) {
    const double th = two_pi * s;
    const double r = o.outer + o.lobe * std::cos(5.0 * th);
    const double r1 = -5.0 * o.lobe * std::sin(5.0 * th);
    const double r2 = -25.0 * o.lobe * std::cos(5.0 * th);
    const Eigen::Vector2d radial(std::cos(th), std::sin(th));
    const Eigen::Vector2d tangential = perp(radial);
    const Eigen::Vector2d p = o.center + r * radial;
    const Eigen::Vector2d p_th = r1 * radial + r * tangential;
    const Eigen::Vector2d p_thth = (r2 - r) * radial + 2.0 * r1 * tangential;

    spec.position.push_back(p);
    spec.velocity.push_back(two_pi * p_th);
    spec.acceleration.push_back(two_pi * two_pi * p_thth);
    spec.W.push_back(cable_wrench_matrix(p, o.anchors));
    spec.A.push_back(o.mass * spec.velocity.back());
    spec.B.push_back(o.mass * spec.acceleration.back());
    spec.f.push_back(-o.mass * o.gravity);
  }
  return spec;
}

Eigen::Vector2d cable_wrench(const CableRobotSpec& spec, std::size_t k, double x, double u) {
  return spec.A[k] * u + spec.B[k] * x + spec.f[k];
}

}  // namespace qopp::gen
