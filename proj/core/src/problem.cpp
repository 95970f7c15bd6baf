#include "qopp/problem.hpp"

#include <cmath>
#include <sstream>

#include "qopp/errors.hpp"

namespace qopp {

pwq::BivariateQuadratic QuadraticStepCost::normalized() const {
  pwq::BivariateQuadratic b;
  b.p = 2.0 * Q;
  b.r = 2.0 * R;
  b.n = Ncross;
  b.g = -2.0 * Q * x_des - Ncross * u_des + lin_x;
  b.h = -2.0 * R * u_des - Ncross * x_des + lin_u;
  b.k = Q * x_des * x_des + R * u_des * u_des + Ncross * x_des * u_des + offset;
  return b;
}

bool QuadraticStepCost::is_convex() const {
  const double scale = std::max({std::abs(Q), std::abs(R), std::abs(Ncross), 1e-300});
  const double tol = 1e-12 * scale;
  return Q >= -tol && R >= -tol && Q * R - 0.25 * Ncross * Ncross >= -tol * scale;
}

std::vector<double> DiscretizedProblem::grid() const {
  std::vector<double> s(steps.size(), 0.0);
  for (std::size_t k = 0; k < delta_s.size() && k + 1 < s.size(); ++k) {
    s[k + 1] = s[k] + delta_s[k];
  }
  return s;
}

void set_uniform_spacing(DiscretizedProblem& problem, double delta) {
  problem.delta_s.assign(problem.horizon(), delta);
  problem.uniform_delta_s = true;
}

void check_path(const PathSamples& path) {
  const std::size_t m = path.grid.size();
  if (m < 2) throw DimensionMismatch("path needs at least two samples");
  if (path.q.size() != m || path.dq_ds.size() != m || path.d2q_ds2.size() != m) {
    throw DimensionMismatch("path arrays must have one entry per grid sample");
  }
  if (path.grid.front() != 0.0 || path.grid.back() != 1.0) {
    throw DimensionMismatch("path grid must start at 0 and end at 1");
  }
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (!(path.grid[k] < path.grid[k + 1])) {
      throw DimensionMismatch("path grid must be strictly increasing");
    }
  }
  const Eigen::Index n = path.q.front().size();
  for (std::size_t k = 0; k < m; ++k) {
    if (path.q[k].size() != n || path.dq_ds[k].size() != n || path.d2q_ds2[k].size() != n) {
      throw DimensionMismatch("path samples must share one dimension");
    }
    if (!path.q[k].allFinite() || !path.dq_ds[k].allFinite() ||
        !path.d2q_ds2[k].allFinite()) {
      throw NonFiniteCoefficient("path sample " + std::to_string(k) + " is not finite");
    }
  }
}

Interval square_velocity_limits(const std::vector<VelocityRow>& rows,
                                std::size_t sample) {
  double lo = 0.0;
  double hi = kInf;
  for (const VelocityRow& r : rows) {
    if (r.a_v > 0.0) {
      lo = std::max(lo, (r.lo - r.c_v) / r.a_v);
      hi = std::min(hi, (r.hi - r.c_v) / r.a_v);
    } else if (r.a_v < 0.0) {
      lo = std::max(lo, (r.hi - r.c_v) / r.a_v);
      hi = std::min(hi, (r.lo - r.c_v) / r.a_v);
    } else if (r.c_v < r.lo || r.c_v > r.hi) {
      throw EmptyVelocityInterval(
          sample, "sample " + std::to_string(sample) + ": constant velocity row violated");
    }
  }
  if (!(hi > 0.0) || lo > hi) {
    throw EmptyVelocityInterval(
        sample, "sample " + std::to_string(sample) + ": no positive path speed admitted");
  }
  return {lo * lo, hi == kInf ? kInf : hi * hi};
}

std::vector<DiscretizedStep> reparameterize(const PathSamples& path,
                                            const TaskConstraintSet& task) {
  check_path(path);
  const std::size_t m = path.samples();
  const Eigen::Index n = static_cast<Eigen::Index>(path.dof());
  if (!task.second_order.empty() && task.second_order.size() != m) {
    throw DimensionMismatch("second-order constraints need one entry per sample");
  }
  if (!task.first_order.empty() && task.first_order.size() != m) {
    throw DimensionMismatch("first-order constraints need one entry per sample");
  }

  std::vector<DiscretizedStep> steps(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd& dq = path.dq_ds[k];
    const Eigen::VectorXd& ddq = path.d2q_ds2[k];
    DiscretizedStep& step = steps[k];

    if (!task.second_order.empty()) {
      const SecondOrderSample& so = task.second_order[k];
      const Eigen::Index rows = so.A.rows();
      if (so.A.cols() != n || static_cast<Eigen::Index>(so.B.size()) != rows ||
          so.f.size() != rows || so.lo.size() != rows || so.hi.size() != rows) {
        throw DimensionMismatch("second-order constraint at sample " + std::to_string(k) +
                                " has inconsistent dimensions");
      }
      if (!so.A.allFinite() || !so.f.allFinite()) {
        throw NonFiniteCoefficient("second-order coefficients at sample " +
                                   std::to_string(k) + " are not finite");
      }
      const Eigen::VectorXd a = so.A * dq;
      const Eigen::VectorXd b_lin = so.A * ddq;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::MatrixXd& B = so.B[static_cast<std::size_t>(i)];
        if (B.rows() != n || B.cols() != n) {
          throw DimensionMismatch("B tensor slice has wrong shape at sample " +
                                  std::to_string(k));
        }
        if (!B.allFinite()) {
          throw NonFiniteCoefficient("B tensor at sample " + std::to_string(k) +
                                     " is not finite");
        }
        if (so.lo[i] > so.hi[i]) {
          throw InvalidProblem("second-order bounds inverted at sample " + std::to_string(k));
        }
        step.add_row(a[i], b_lin[i] + dq.dot(B * dq), so.f[i], so.lo[i], so.hi[i]);
      }
    }

    if (!task.first_order.empty()) {
      const FirstOrderSample& fo = task.first_order[k];
      const Eigen::Index rows = fo.A.rows();
      if (fo.A.cols() != n || fo.f.size() != rows || fo.lo.size() != rows ||
          fo.hi.size() != rows) {
        throw DimensionMismatch("first-order constraint at sample " + std::to_string(k) +
                                " has inconsistent dimensions");
      }
      if (!fo.A.allFinite() || !fo.f.allFinite()) {
        throw NonFiniteCoefficient("first-order coefficients at sample " +
                                   std::to_string(k) + " are not finite");
      }
      const Eigen::VectorXd av = fo.A * dq;
      std::vector<VelocityRow> vrows;
      vrows.reserve(static_cast<std::size_t>(rows));
      for (Eigen::Index i = 0; i < rows; ++i) {
        vrows.push_back({av[i], fo.f[i], fo.lo[i], fo.hi[i]});
      }
      const Interval x = square_velocity_limits(vrows, k);
      step.add_row(0.0, 1.0, 0.0, x.lo, x.hi);
    }
  }
  return steps;
}

DiscretizedProblem make_problem(const PathSamples& path, const TaskConstraintSet& task,
                                const BoundaryConditions& boundary) {
  DiscretizedProblem problem;
  problem.steps = reparameterize(path, task);
  problem.boundary = boundary;
  problem.delta_s.resize(path.samples() - 1);
  bool uniform = true;
  for (std::size_t k = 0; k + 1 < path.samples(); ++k) {
    problem.delta_s[k] = path.grid[k + 1] - path.grid[k];
    uniform = uniform && problem.delta_s[k] == problem.delta_s[0];
  }
  problem.uniform_delta_s = uniform;
  return problem;
}

std::vector<std::string> validate(const DiscretizedProblem& problem) {
  std::vector<std::string> out;
  auto report = [&out](const std::string& s) { out.push_back(s); };

  const std::size_t n_steps = problem.steps.size();
  if (n_steps < 2) report("problem needs at least two steps (N >= 1)");
  const std::size_t N = problem.horizon();

  if (problem.delta_s.size() != N) {
    report("delta_s has " + std::to_string(problem.delta_s.size()) +
           " entries, expected " + std::to_string(N));
  }
  for (std::size_t k = 0; k < problem.delta_s.size(); ++k) {
    const double d = problem.delta_s[k];
    if (!std::isfinite(d) || !(d > 0.0)) {
      report("delta_s[" + std::to_string(k) + "] must be finite and strictly positive");
    }
  }

  for (std::size_t k = 0; k < n_steps; ++k) {
    const DiscretizedStep& s = problem.steps[k];
    const std::size_t m = s.a.size();
    const std::string where = "step " + std::to_string(k);
    if (s.b.size() != m || s.c.size() != m || s.lo.size() != m || s.hi.size() != m) {
      report(where + ": row arrays differ in length");
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const std::string row = where + " row " + std::to_string(i);
      if (!std::isfinite(s.a[i]) || !std::isfinite(s.b[i]) || !std::isfinite(s.c[i])) {
        report(row + ": non-finite coefficient");
      }
      if (std::isnan(s.lo[i]) || std::isnan(s.hi[i]) || s.lo[i] == kInf || s.hi[i] == -kInf) {
        report(row + ": invalid bound");
      } else if (s.lo[i] > s.hi[i]) {
        report(row + ": lo > hi");
      }
    }
  }

  if (!std::isfinite(problem.x_floor) || problem.x_floor < 0.0) {
    report("x_floor must be finite and non-negative");
  }
  auto check_boundary = [&](const Interval& i, const char* name) {
    if (std::isnan(i.lo) || std::isnan(i.hi) || i.empty()) {
      report(std::string("boundary ") + name + ": lower bound exceeds upper bound");
    } else if (i.lo < problem.x_floor) {
      report(std::string("boundary ") + name + ": lower bound below x_floor");
    }
  };
  check_boundary(problem.boundary.x0, "x0");
  check_boundary(problem.boundary.xN, "xN");

  if (problem.costs) {
    if (problem.costs->size() != n_steps) {
      report("costs has " + std::to_string(problem.costs->size()) +
             " entries, expected " + std::to_string(n_steps));
    }
    for (std::size_t k = 0; k < problem.costs->size(); ++k) {
      const QuadraticStepCost& c = (*problem.costs)[k];
      const std::string where = "cost " + std::to_string(k);
      const double fields[] = {c.Q, c.R, c.Ncross, c.x_des, c.u_des, c.lin_x, c.lin_u, c.offset};
      bool finite = true;
      for (double f : fields) finite = finite && std::isfinite(f);
      if (!finite) {
        report(where + ": non-finite coefficient");
      } else if (!c.is_convex()) {
        std::ostringstream os;
        os << where << ": [[Q, N/2], [N/2, R]] is not positive semidefinite (Q=" << c.Q
           << ", R=" << c.R << ", N=" << c.Ncross << ")";
        report(os.str());
      }
    }
  }
  return out;
}

}  // namespace qopp
