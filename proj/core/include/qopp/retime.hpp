#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "qopp/elimination.hpp"
#include "qopp/problem.hpp"

namespace qopp {

/// Time parameterization induced by a piecewise-constant path acceleration.
/// Within interval k, sdot(t) = sqrt(x_k) + u_k * (t - t_k) and s(t) is
/// quadratic in t.
struct TimingResult {
  std::vector<double> t;             ///< N + 1 knot times, t[0] = 0
  std::vector<double> interval_time; ///< N per-interval durations
  double duration = 0.0;             ///< t.back()
  std::vector<double> s;             ///< N + 1 path coordinates
  std::vector<double> x;             ///< N + 1 squared speeds (clamped >= 0)
  std::vector<double> u;             ///< N accelerations

  /// Interval containing time tau (clamped to [0, duration]).
  std::size_t interval_at(double tau) const;
  double s_at(double tau) const;
  double sdot_at(double tau) const;
};

/// T = sum 2 ds_k / (sqrt(x_k) + sqrt(x_{k+1})), exact under zero-order hold on
/// u. Throws Untraversable{k} if x_k = x_{k+1} = 0.
TimingResult compute_timing(std::span<const double> x, std::span<const double> delta_s);
TimingResult compute_timing(const SolutionProfile& profile, std::span<const double> delta_s);

/// Total duration only.
double duration(std::span<const double> x, std::span<const double> delta_s);

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolation of each
/// coordinate of q(s).
class PathInterpolator {
 public:
  explicit PathInterpolator(const PathSamples& path);
  PathInterpolator(std::vector<double> grid, std::vector<Eigen::VectorXd> q);

  struct Eval {
    Eigen::VectorXd q;
    Eigen::VectorXd dq_ds;
    Eigen::VectorXd d2q_ds2;
  };
  Eval operator()(double s) const;
  std::size_t dof() const { return dof_; }

 private:
  void fit();

  std::vector<double> grid_;
  std::vector<Eigen::VectorXd> q_;
  std::vector<Eigen::VectorXd> slope_;
  std::size_t dof_ = 0;
};

struct TimedTrajectory {
  std::vector<double> t;
  std::vector<double> s;
  std::vector<double> sdot;
  std::vector<double> x;
  std::vector<double> u;
  std::vector<Eigen::VectorXd> q;    ///< empty when sampled without a path
  std::vector<Eigen::VectorXd> qd;
  std::vector<Eigen::VectorXd> qdd;
};

/// Samples s(t) every dt seconds; the last sample is at exactly T.
/// Throws InvalidProblem for dt <= 0 and Untraversable.
TimedTrajectory sample_parameterization(std::span<const double> grid,
                                        const SolutionProfile& profile, double dt);

/// As sample_parameterization, then evaluates q, qd, qdd through the chain rule
/// qd = q' sdot and qdd = q'' sdot^2 + q' sddot. The path grid must match the
/// profile's steps.
TimedTrajectory sample_trajectory(const PathSamples& path, const SolutionProfile& profile,
                                  double dt);

/// Header t,s,sdot,x,u,q_0..q_{n-1},qd_0..qd_{n-1}; one row per sample.
void write_trajectory_csv(std::ostream& os, const TimedTrajectory& traj);

}  // namespace qopp
