#include "qopp/retime.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "qopp/errors.hpp"

namespace qopp {

TimingResult compute_timing(std::span<const double> x, std::span<const double> delta_s) {
  if (x.size() < 2 || delta_s.size() + 1 != x.size()) {
    throw DimensionMismatch("timing: need N + 1 speeds and N spacings");
  }
  const std::size_t N = delta_s.size();
  TimingResult r;
  r.t.assign(N + 1, 0.0);
  r.s.assign(N + 1, 0.0);
  r.interval_time.assign(N, 0.0);
  r.u.assign(N, 0.0);
  r.x.resize(N + 1);
  for (std::size_t k = 0; k <= N; ++k) r.x[k] = std::max(0.0, x[k]);

  for (std::size_t k = 0; k < N; ++k) {
    const double denom = std::sqrt(r.x[k]) + std::sqrt(r.x[k + 1]);
    if (denom == 0.0) {
      throw Untraversable(k, "interval " + std::to_string(k) +
                                 " has zero speed at both ends; traversal time is infinite");
    }
    r.interval_time[k] = 2.0 * delta_s[k] / denom;
    r.t[k + 1] = r.t[k] + r.interval_time[k];
    r.s[k + 1] = r.s[k] + delta_s[k];
    r.u[k] = (r.x[k + 1] - r.x[k]) / (2.0 * delta_s[k]);
  }
  r.duration = r.t.back();
  return r;
}

TimingResult compute_timing(const SolutionProfile& profile, std::span<const double> delta_s) {
  return compute_timing(std::span<const double>(profile.x), delta_s);
}

double duration(std::span<const double> x, std::span<const double> delta_s) {
  return compute_timing(x, delta_s).duration;
}

std::size_t TimingResult::interval_at(double tau) const {
  const std::size_t N = interval_time.size();
  const auto it = std::upper_bound(t.begin() + 1, t.end() - 1, tau);
  return std::min<std::size_t>(static_cast<std::size_t>(it - (t.begin() + 1)), N - 1);
}

double TimingResult::s_at(double tau) const {
  tau = std::clamp(tau, 0.0, duration);
  const std::size_t k = interval_at(tau);
  const double dt = tau - t[k];
  const double s_val = s[k] + std::sqrt(x[k]) * dt + 0.5 * u[k] * dt * dt;
  return std::clamp(s_val, s[k], s[k + 1]);
}

double TimingResult::sdot_at(double tau) const {
  tau = std::clamp(tau, 0.0, duration);
  const std::size_t k = interval_at(tau);
  return std::max(0.0, std::sqrt(x[k]) + u[k] * (tau - t[k]));
}

PathInterpolator::PathInterpolator(const PathSamples& path)
    : grid_(path.grid), q_(path.q) {
  check_path(path);
  fit();
}

PathInterpolator::PathInterpolator(std::vector<double> grid, std::vector<Eigen::VectorXd> q)
    : grid_(std::move(grid)), q_(std::move(q)) {
  if (grid_.size() < 2 || grid_.size() != q_.size()) {
    throw DimensionMismatch("interpolator: need >= 2 samples with one q per grid point");
  }
  fit();
}

void PathInterpolator::fit() {
  const std::size_t m = grid_.size();
  dof_ = static_cast<std::size_t>(q_.front().size());
  slope_.assign(m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_)));
  std::vector<double> h(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) h[k] = grid_[k + 1] - grid_[k];

  for (std::size_t j = 0; j < dof_; ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    std::vector<double> delta(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) delta[k] = (q_[k + 1][idx] - q_[k][idx]) / h[k];
    if (m == 2) {
      slope_[0][idx] = slope_[1][idx] = delta[0];
      continue;
    }
    for (std::size_t k = 1; k + 1 < m; ++k) {
      const double d0 = delta[k - 1];
      const double d1 = delta[k];
      if (d0 * d1 <= 0.0) {
        slope_[k][idx] = 0.0;
      } else {
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        slope_[k][idx] = (w1 + w2) / (w1 / d0 + w2 / d1);
      }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (d * d0 <= 0.0) {
        d = 0.0;
      } else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) {
        d = 3.0 * d0;
      }
      return d;
    };
    slope_[0][idx] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope_[m - 1][idx] = end_slope(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
  }
}

PathInterpolator::Eval PathInterpolator::operator()(double s) const {
  const std::size_t m = grid_.size();
  s = std::clamp(s, grid_.front(), grid_.back());
  const auto it = std::upper_bound(grid_.begin() + 1, grid_.end() - 1, s);
  const std::size_t k = static_cast<std::size_t>(it - (grid_.begin() + 1));
  (void)m;
  const double h = grid_[k + 1] - grid_[k];
  const double t = (s - grid_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;

  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  const double e00 = 12 * t - 6, e10 = 6 * t - 4, e01 = -12 * t + 6, e11 = 6 * t - 2;

  const Eigen::VectorXd& q0 = q_[k];
  const Eigen::VectorXd& q1 = q_[k + 1];
  const Eigen::VectorXd& m0 = slope_[k];
  const Eigen::VectorXd& m1 = slope_[k + 1];
  Eval e;
  e.q = h00 * q0 + h10 * h * m0 + h01 * q1 + h11 * h * m1;
  e.dq_ds = (d00 * q0 + d01 * q1) / h + d10 * m0 + d11 * m1;
  e.d2q_ds2 = (e00 * q0 + e01 * q1) / (h * h) + (e10 * m0 + e11 * m1) / h;
  return e;
}

TimedTrajectory sample_parameterization(std::span<const double> grid,
                                        const SolutionProfile& profile, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidProblem("dt must be positive");
  if (grid.size() != profile.x.size()) {
    throw DimensionMismatch("grid and profile lengths differ");
  }
  std::vector<double> ds(grid.size() - 1);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) ds[k] = grid[k + 1] - grid[k];
  const TimingResult timing = compute_timing(profile, ds);

  TimedTrajectory out;
  const auto count = static_cast<std::size_t>(std::floor(timing.duration / dt));
  for (std::size_t j = 0; j <= count; ++j) out.t.push_back(static_cast<double>(j) * dt);
  if (timing.duration - out.t.back() > 1e-12 * std::max(1.0, timing.duration)) {
    out.t.push_back(timing.duration);
  } else {
    out.t.back() = timing.duration;
    if (out.t.size() == 1) out.t.push_back(timing.duration);
  }
  for (double tau : out.t) {
    const std::size_t k = timing.interval_at(tau);
    // grid offsets keep knot samples exact when the grid does not start at 0
    out.s.push_back(grid.front() + timing.s_at(tau));
    out.sdot.push_back(timing.sdot_at(tau));
    out.x.push_back(out.sdot.back() * out.sdot.back());
    out.u.push_back(timing.u[k]);
  }
  return out;
}

TimedTrajectory sample_trajectory(const PathSamples& path, const SolutionProfile& profile,
                                  double dt) {
  TimedTrajectory out = sample_parameterization(path.grid, profile, dt);
  const PathInterpolator interp(path);
  out.q.reserve(out.t.size());
  out.qd.reserve(out.t.size());
  out.qdd.reserve(out.t.size());
  for (std::size_t j = 0; j < out.t.size(); ++j) {
    const PathInterpolator::Eval e = interp(out.s[j]);
    out.q.push_back(e.q);
    out.qd.push_back(e.dq_ds * out.sdot[j]);
    out.qdd.push_back(e.d2q_ds2 * out.x[j] + e.dq_ds * out.u[j]);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const TimedTrajectory& traj) {
  const std::size_t n = traj.q.empty() ? 0 : static_cast<std::size_t>(traj.q.front().size());
  os << "t,s,sdot,x,u";
  for (std::size_t i = 0; i < n; ++i) os << ",q_" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",qd_" << i;
  os << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t j = 0; j < traj.t.size(); ++j) {
    os << traj.t[j] << ',' << traj.s[j] << ',' << traj.sdot[j] << ',' << traj.x[j] << ','
       << traj.u[j];
    for (std::size_t i = 0; i < n; ++i) os << ',' << traj.q[j][static_cast<Eigen::Index>(i)];
    for (std::size_t i = 0; i < n; ++i) os << ',' << traj.qd[j][static_cast<Eigen::Index>(i)];
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace qopp
