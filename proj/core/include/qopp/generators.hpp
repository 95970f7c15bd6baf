#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "qopp/problem.hpp"

namespace qopp::gen {

/// x_{k+1} = x_k + 0.5 u_k with x_k + u_k <= 0.1 at every step, x_0 = 0 and
/// x_N >= 0. With quadratic = true every step costs x_k^2 + u_k^2 (the last
/// one only x_N^2). Throws InvalidProblem for N = 0.
DiscretizedProblem simple_benchmark(std::size_t N, bool quadratic = false);

/// Joint acceleration box |qdd_i| <= amax_i and velocity box |qd_i| <= vmax_i,
/// rest to rest. Throws InvalidProblem for negative limits, DegeneratePath if
/// dq/ds vanishes at every sample, EmptyVelocityInterval if some sample
/// admits no positive speed (e.g. vmax = 0).
DiscretizedProblem kinematic_limits(const PathSamples& path, const Eigen::VectorXd& vmax,
                                    const Eigen::VectorXd& amax);

/// q(s) = radius * (cos 2 pi s, sin 2 pi s) sampled at N + 1 uniform points with
/// exact derivatives.
PathSamples circle_path(std::size_t N, double radius = 1.0);

/// n . F <= offset with |n| = 1.
struct WrenchHalfplane {
  Eigen::Vector2d normal;
  double offset = 0.0;

  double slack(const Eigen::Vector2d& F) const { return offset - normal.dot(F); }
};

/// The set {W t : t_lo <= t <= t_hi} for a 2 x m wrench matrix, as halfplanes
/// sorted by normal angle in [-pi, pi). Parallel columns share one pair of
/// halfplanes. Throws UnsupportedDimension unless W has 2 rows,
/// RankDeficient if rank W < 2, InvalidProblem if t_lo > t_hi.
std::vector<WrenchHalfplane> tension_polytope(const Eigen::MatrixXd& W,
                                              const Eigen::VectorXd& t_lo,
                                              const Eigen::VectorXd& t_hi);

/// Counter-clockwise vertices of the polygon cut out by halfplanes sorted by
/// angle, as returned by tension_polytope.
std::vector<Eigen::Vector2d> polygon_vertices(const std::vector<WrenchHalfplane>& halfplanes);

/// Signed distance from F to the nearest edge; negative outside.
double wrench_margin(const std::vector<WrenchHalfplane>& halfplanes, const Eigen::Vector2d& F);

/// Planar cable robot along a sampled task-space path. The wrench F required
/// at a sample is A u + B x + f with (A, B, f) given per sample; for a point
/// mass M under gravity g, A = M p', B = M p'', f = -M g.
struct CableRobotSpec {
  std::vector<double> grid;
  std::vector<Eigen::Vector2d> position;      ///< p(s)
  std::vector<Eigen::Vector2d> velocity;      ///< p'(s)
  std::vector<Eigen::Vector2d> acceleration;  ///< p''(s)
  std::vector<Eigen::MatrixXd> W;             ///< 2 x m per sample
  std::vector<Eigen::Vector2d> A;
  std::vector<Eigen::Vector2d> B;
  std::vector<Eigen::Vector2d> f;
  Eigen::VectorXd t_lo;
  Eigen::VectorXd t_hi;
  double v_desired = 2.0;      ///< m/s
  double speed_weight = 1.0;   ///< q'
  double margin_weight = 1e-2; ///< r
  BoundaryConditions boundary;

  Eigen::VectorXd t_mid() const { return 0.5 * (t_lo + t_hi); }
  std::size_t samples() const { return grid.size(); }
};

/// Per-step weights of q |x - x_d|^2 + r |A u + B x + C'|^2 with
/// q = q' |p'|^4, x_d = v_d^2 / |p'|^2 and C' = f - W t_m.
struct CableCostTerms {
  double q = 0.0;
  double x_d = 0.0;
  double r = 0.0;
  Eigen::Vector2d A;
  Eigen::Vector2d B;
  Eigen::Vector2d C;

  /// The objective evaluated directly, for checking the assembled cost.
  double operator()(double x, double u) const {
    return q * (x - x_d) * (x - x_d) + r * (A * u + B * x + C).squaredNorm();
  }
  QuadraticStepCost assemble() const;
};

CableCostTerms cable_cost_terms(const CableRobotSpec& spec, std::size_t k);

/// Rows from every halfplane of the tension zonogon (a = n.A, b = n.B,
/// c = n.f, hi = offset) plus the assembled quadratic costs. Throws
/// DimensionMismatch, DegeneratePath (|p'| = 0), and the tension_polytope
/// errors.
DiscretizedProblem cable_robot_problem(const CableRobotSpec& spec);

/// Wrench matrix with unit columns from p toward each anchor.
Eigen::MatrixXd cable_wrench_matrix(const Eigen::Vector2d& p,
                                    const std::vector<Eigen::Vector2d>& anchors);

struct StarRobotOptions {
  double outer = 0.5;   ///< mean radius R0 of r(theta) = R0 + R1 cos 5 theta
  double lobe = 0.15;   ///< R1
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> anchors = {{-1.5, -1.0}, {1.5, -1.0}, {1.5, 1.0}, {-1.5, 1.0}};
  double mass = 0.5;
  Eigen::Vector2d gravity = {0.0, -9.81};
  double t_min = 5.0;
  double t_max = 100.0;
  double v_desired = 2.0;
  double speed_weight = 1.0;
  double margin_weight = 1e-2;
};

/// Point-mass, four-cable robot tracing a five-lobed star, rest to rest, over
/// N intervals. The physical defaults are placeholders, not a specific robot.
CableRobotSpec star_cable_robot(std::size_t N, const StarRobotOptions& options = {});

/// Wrench A u + B x + f at sample k for a solved profile (u_N := 0).
Eigen::Vector2d cable_wrench(const CableRobotSpec& spec, std::size_t k, double x, double u);

}  // namespace qopp::gen
