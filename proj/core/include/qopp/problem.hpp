#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qopp/interval.hpp"
#include "qopp/pwq.hpp"

namespace qopp {

/// Samples of a geometric path q(s), s in [0, 1].
struct PathSamples {
  std::vector<double> grid;  ///< strictly increasing, grid[0] = 0, grid.back() = 1
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> dq_ds;
  std::vector<Eigen::VectorXd> d2q_ds2;

  std::size_t samples() const { return grid.size(); }
  std::size_t dof() const { return q.empty() ? 0 : static_cast<std::size_t>(q.front().size()); }
};

/// A(s) qdd + qd^T B(s) qd + f(s) in [lo, hi], row-wise, at one sample.
/// B holds one n x n matrix per row of A.
struct SecondOrderSample {
  Eigen::MatrixXd A;
  std::vector<Eigen::MatrixXd> B;
  Eigen::VectorXd f;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// A_v(s) qd + f_v(s) in [lo, hi], row-wise, at one sample.
struct FirstOrderSample {
  Eigen::MatrixXd A;
  Eigen::VectorXd f;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// Either vector may be empty; otherwise it has one entry per path sample.
struct TaskConstraintSet {
  std::vector<SecondOrderSample> second_order;
  std::vector<FirstOrderSample> first_order;
};

/// Rows a_i*u + b_i*x + c_i in [lo_i, hi_i] on (x, u) = (sdot^2, sddot).
struct DiscretizedStep {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t rows() const { return a.size(); }
  void add_row(double a_i, double b_i, double c_i, double lo_i, double hi_i) {
    a.push_back(a_i);
    b.push_back(b_i);
    c.push_back(c_i);
    lo.push_back(lo_i);
    hi.push_back(hi_i);
  }
};

struct BoundaryConditions {
  Interval x0 = Interval::Point(0.0);
  Interval xN = Interval::Point(0.0);
};

/// Q*xt^2 + R*ut^2 + Ncross*xt*ut with xt = x - x_des, ut = u - u_des, plus
/// lin_x*x + lin_u*u + offset. The extra linear terms carry objectives that do
/// not complete to a target form (see cable_robot_problem).
struct QuadraticStepCost {
  double Q = 0.0;
  double R = 0.0;
  double Ncross = 0.0;
  double x_des = 0.0;
  double u_des = 0.0;
  double lin_x = 0.0;
  double lin_u = 0.0;
  double offset = 0.0;

  /// 0.5*p*x^2 + 0.5*r*u^2 + n*x*u + g*x + h*u + k, with (x, u) in the
  /// BivariateQuadratic (x, y) slots.
  pwq::BivariateQuadratic normalized() const;
  double operator()(double x, double u) const { return normalized()(x, u); }
  /// Q >= 0, R >= 0 and Q*R >= Ncross^2/4, within a relative tolerance.
  bool is_convex() const;
};

struct DiscretizedProblem {
  std::vector<DiscretizedStep> steps;  ///< N + 1 entries; step N uses u_N := 0
  std::vector<double> delta_s;         ///< N spacings (all equal when uniform)
  bool uniform_delta_s = true;         ///< serialize delta_s as a scalar
  BoundaryConditions boundary;
  std::optional<std::vector<QuadraticStepCost>> costs;  ///< N + 1 entries
  double x_floor = 0.0;

  std::size_t horizon() const { return steps.empty() ? 0 : steps.size() - 1; }
  bool has_costs() const { return costs.has_value(); }
  /// Path coordinate of every step, starting at 0.
  std::vector<double> grid() const;
};

/// Sets delta_s to N copies of delta.
void set_uniform_spacing(DiscretizedProblem& problem, double delta);

/// Second-order rows at every sample: a = A q', b = A q'' + q'^T B_i q',
/// c = f. Velocity rows from task.first_order are squared and appended as a
/// single (a = 0, b = 1, c = 0) row per sample.
/// Throws DimensionMismatch, NonFiniteCoefficient, EmptyVelocityInterval.
std::vector<DiscretizedStep> reparameterize(const PathSamples& path,
                                            const TaskConstraintSet& task);

/// One first-order row a_v*sdot + c_v in [lo, hi] on the scalar path speed.
struct VelocityRow {
  double a_v = 0.0;
  double c_v = 0.0;
  double lo = -kInf;
  double hi = kInf;
};

/// Admissible x = sdot^2 given every row holds and sdot >= 0. Throws
/// EmptyVelocityInterval when no positive sdot is admitted.
Interval square_velocity_limits(const std::vector<VelocityRow>& rows,
                                std::size_t sample = 0);

/// Wraps reparameterize() into a problem on the path's grid.
DiscretizedProblem make_problem(const PathSamples& path,
                                const TaskConstraintSet& task,
                                const BoundaryConditions& boundary = {});

/// Violated invariants, empty if the problem is valid. Never throws.
std::vector<std::string> validate(const DiscretizedProblem& problem);

/// Checks PathSamples invariants; throws DimensionMismatch or
/// NonFiniteCoefficient.
void check_path(const PathSamples& path);

}  // namespace qopp
