#include "qopp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "qopp/errors.hpp"

namespace qopp::oracle {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-12;
constexpr std::size_t kBlandAfter = 50;
constexpr std::size_t kMaxPivots = 200000;

// Standard form min c^T y, A y = b, y >= 0, b >= 0.
struct StandardForm {
  RowMatrix A;
  Eigen::VectorXd b;
  std::vector<std::ptrdiff_t> pos;
  std::vector<std::ptrdiff_t> neg;
  Eigen::VectorXd shift;
  Eigen::Index cols = 0;

  Eigen::VectorXd cost(const Eigen::VectorXd& c) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(cols);
    for (std::size_t j = 0; j < pos.size(); ++j) {
      y[pos[j]] = c[static_cast<Eigen::Index>(j)];
      if (neg[j] >= 0) y[neg[j]] = -c[static_cast<Eigen::Index>(j)];
    }
    return y;
  }

  Eigen::VectorXd recover(const Eigen::VectorXd& y) const {
    Eigen::VectorXd z(static_cast<Eigen::Index>(pos.size()));
    for (std::size_t j = 0; j < pos.size(); ++j) {
      double v = y[pos[j]];
      if (neg[j] >= 0) v -= y[neg[j]];
      z[static_cast<Eigen::Index>(j)] = v + shift[static_cast<Eigen::Index>(j)];
    }
    return z;
  }
};

StandardForm standardize(const LinearProgram& lp) {
  const auto n = static_cast<Eigen::Index>(lp.vars());
  const Eigen::Index m_eq = lp.A_eq.rows();
  const Eigen::Index m_in = lp.A_in.rows();
  StandardForm sf;
  sf.pos.assign(static_cast<std::size_t>(n), -1);
  sf.neg.assign(static_cast<std::size_t>(n), -1);
  sf.shift = Eigen::VectorXd::Zero(n);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    sf.pos[static_cast<std::size_t>(j)] = col++;
    if (std::isfinite(lp.lower[j])) {
      sf.shift[j] = lp.lower[j];
    } else {
      sf.neg[static_cast<std::size_t>(j)] = col++;
    }
  }
  const Eigen::Index slack0 = col;
  sf.cols = col + m_in;
  const Eigen::Index m = m_eq + m_in;
  sf.A = RowMatrix::Zero(m, sf.cols);
  sf.b.resize(m);

  auto fill = [&](Eigen::Index row, const auto& coeffs, double rhs) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = coeffs[j];
      if (a == 0.0) continue;
      sf.A(row, sf.pos[static_cast<std::size_t>(j)]) = a;
      if (sf.neg[static_cast<std::size_t>(j)] >= 0) {
        sf.A(row, sf.neg[static_cast<std::size_t>(j)]) = -a;
      }
      rhs -= a * sf.shift[j];
    }
    sf.b[row] = rhs;
  };
  for (Eigen::Index i = 0; i < m_eq; ++i) fill(i, lp.A_eq.row(i), lp.b_eq[i]);
  for (Eigen::Index i = 0; i < m_in; ++i) {
    fill(m_eq + i, lp.A_in.row(i), lp.b_in[i]);
    sf.A(m_eq + i, slack0 + i) = 1.0;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (sf.b[i] < 0.0) {
      sf.A.row(i) *= -1.0;
      sf.b[i] = -sf.b[i];
    }
  }
  return sf;
}

class Tableau {
 public:
  explicit Tableau(const StandardForm& sf) : sf_(sf) {
    m_ = sf.A.rows();
    n_ = sf.cols;
    const Eigen::Index total = n_ + m_;
    T_ = RowMatrix::Zero(m_, total + 1);
    T_.leftCols(n_) = sf.A;
    T_.block(0, n_, m_, m_).setIdentity();
    T_.col(total) = sf.b;
    basis_.resize(static_cast<std::size_t>(m_));
    std::iota(basis_.begin(), basis_.end(), n_);
    is_basic_.assign(static_cast<std::size_t>(total), 0);
    for (Eigen::Index r = 0; r < m_; ++r) is_basic_[static_cast<std::size_t>(n_ + r)] = 1;
    allowed_.assign(static_cast<std::size_t>(total), 1);
  }

  bool phase_one() {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_ + m_);
    c.tail(m_).setOnes();
    if (optimize_full(c) != LpStatus::kOptimal) {
      throw NotConverged("phase one reported an unbounded auxiliary problem");
    }
    const double infeasibility = -d_[n_ + m_];
    const double scale = std::max(1.0, sf_.b.size() ? sf_.b.lpNorm<Eigen::Infinity>() : 0.0);
    if (infeasibility > 1e-9 * scale) return false;

    for (Eigen::Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < n_) continue;
      Eigen::Index best = -1;
      double best_abs = kPivotTol;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        if (std::abs(T_(r, j)) > best_abs) {
          best_abs = std::abs(T_(r, j));
          best = j;
        }
      }
      // A row with no structural entry is redundant; its artificial stays
      // basic at zero and never moves.
      if (best >= 0) pivot(r, best);
    }
    for (Eigen::Index j = n_; j < n_ + m_; ++j) allowed_[static_cast<std::size_t>(j)] = 0;
    return true;
  }

  LpStatus optimize(const Eigen::VectorXd& c_struct) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_ + m_);
    c.head(n_) = c_struct;
    return optimize_full(c);
  }

  // Fixes at zero every nonbasic column whose entry would worsen the
  // objective just optimized.
  void lock_optimal_face() {
    const double tol = 1e-9 * cost_scale_;
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (!is_basic_[static_cast<std::size_t>(j)] && d_[j] > tol) {
        allowed_[static_cast<std::size_t>(j)] = 0;
      }
    }
  }

  // Basic values re-solved from the original columns to shed pivot drift.
  Eigen::VectorXd solution() const {
    Eigen::MatrixXd B(m_, m_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index col = basis_[static_cast<std::size_t>(r)];
      if (col < n_) {
        B.col(r) = sf_.A.col(col);
      } else {
        B.col(r) = Eigen::VectorXd::Unit(m_, col - n_);
      }
    }
    Eigen::VectorXd yb = B.partialPivLu().solve(sf_.b);
    if (!yb.allFinite()) yb = T_.col(n_ + m_);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index col = basis_[static_cast<std::size_t>(r)];
      if (col < n_) y[col] = std::max(0.0, yb[r]);
    }
    return y;
  }

 private:
  LpStatus optimize_full(const Eigen::VectorXd& c) {
    const Eigen::Index total = n_ + m_;
    d_ = Eigen::VectorXd::Zero(total + 1);
    d_.head(total) = c;
    for (Eigen::Index r = 0; r < m_; ++r) {
      const double cb = c[basis_[static_cast<std::size_t>(r)]];
      if (cb != 0.0) d_ -= cb * T_.row(r).transpose();
    }
    for (Eigen::Index r = 0; r < m_; ++r) d_[basis_[static_cast<std::size_t>(r)]] = 0.0;
    cost_scale_ = std::max(1.0, c.lpNorm<Eigen::Infinity>());
    const double tol = 1e-10 * cost_scale_;

    std::size_t degenerate = 0;
    for (std::size_t iter = 0; iter < kMaxPivots; ++iter) {
      Eigen::Index enter = -1;
      double most = -tol;
      for (Eigen::Index j = 0; j < total; ++j) {
        if (!allowed_[static_cast<std::size_t>(j)] || is_basic_[static_cast<std::size_t>(j)]) {
          continue;
        }
        if (d_[j] < most) {
          enter = j;
          most = d_[j];
          if (degenerate >= kBlandAfter) break;  // Bland: first improving column
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < m_; ++r) {
        const double a = T_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(0.0, T_(r, total)) / a;
        if (leave < 0 || ratio < best - kRatioTieTol ||
            (ratio <= best + kRatioTieTol &&
             basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      degenerate = best <= kRatioTieTol ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
    throw NotConverged("simplex pivot limit reached");
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const Eigen::Index total = n_ + m_;
    T_.row(r) /= T_(r, c);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = T_(i, c);
      if (f != 0.0) {
        T_.row(i) -= f * T_.row(r);
        T_(i, c) = 0.0;
        if (T_(i, total) < 0.0 && T_(i, total) > -1e-12) T_(i, total) = 0.0;
      }
    }
    if (d_.size() == total + 1 && d_[c] != 0.0) {
      d_ -= d_[c] * T_.row(r).transpose();
      d_[c] = 0.0;
    }
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
    basis_[static_cast<std::size_t>(r)] = c;
    is_basic_[static_cast<std::size_t>(c)] = 1;
  }

  const StandardForm& sf_;
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  RowMatrix T_;
  Eigen::VectorXd d_;
  double cost_scale_ = 1.0;
  std::vector<Eigen::Index> basis_;
  std::vector<char> is_basic_;
  std::vector<char> allowed_;
};

void require_valid(const DiscretizedProblem& problem) {
  auto diag = validate(problem);
  if (!diag.empty()) throw InvalidProblem("invalid problem: " + diag.front(), std::move(diag));
}

struct RowSink {
  std::vector<Eigen::VectorXd> eq_rows, in_rows;
  std::vector<double> eq_rhs, in_rhs;
  Eigen::Index n;

  Eigen::VectorXd blank() const { return Eigen::VectorXd::Zero(n); }

  void bounded(const Eigen::VectorXd& row, double c, double lo, double hi) {
    if (lo == hi) {
      eq_rows.push_back(row);
      eq_rhs.push_back(lo - c);
      return;
    }
    if (std::isfinite(hi)) {
      in_rows.push_back(row);
      in_rhs.push_back(hi - c);
    }
    if (std::isfinite(lo)) {
      in_rows.push_back(-row);
      in_rhs.push_back(c - lo);
    }
  }

  static void stack(const std::vector<Eigen::VectorXd>& rows, const std::vector<double>& rhs,
                    Eigen::Index n, Eigen::MatrixXd& A, Eigen::VectorXd& b) {
    A.resize(static_cast<Eigen::Index>(rows.size()), n);
    b.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      b[static_cast<Eigen::Index>(i)] = rhs[i];
    }
  }
};

// last: final x index kept. full: rows of every step through `last` (the
// terminal step included), costs and x_N's boundary; otherwise only steps
// before `last`.
DenseInstance build(const DiscretizedProblem& problem, std::size_t last, bool full) {
  DenseInstance inst;
  inst.N = last;
  const auto n = static_cast<Eigen::Index>(inst.vars());
  RowSink sink{{}, {}, {}, {}, n};
  const auto xi = [](std::size_t k) { return static_cast<Eigen::Index>(DenseInstance::x(k)); };
  const auto ui = [&inst](std::size_t k) { return static_cast<Eigen::Index>(inst.u(k)); };

  for (std::size_t k = 0; k < last; ++k) {
    Eigen::VectorXd row = sink.blank();
    row[xi(k + 1)] = 1.0;
    row[xi(k)] = -1.0;
    row[ui(k)] = -2.0 * problem.delta_s[k];
    sink.eq_rows.push_back(row);
    sink.eq_rhs.push_back(0.0);
  }

  const std::size_t step_end = full ? last + 1 : last;
  for (std::size_t k = 0; k < step_end; ++k) {
    const DiscretizedStep& s = problem.steps[k];
    for (std::size_t i = 0; i < s.rows(); ++i) {
      Eigen::VectorXd row = sink.blank();
      row[xi(k)] = s.b[i];
      if (k < last) row[ui(k)] = s.a[i];
      sink.bounded(row, s.c[i], s.lo[i], s.hi[i]);
    }
  }

  auto boundary = [&](std::size_t k, const Interval& b) {
    Eigen::VectorXd row = sink.blank();
    row[xi(k)] = 1.0;
    sink.bounded(row, 0.0, b.lo, b.hi);
  };
  boundary(0, problem.boundary.x0);
  if (full) boundary(last, problem.boundary.xN);
  for (std::size_t k = 0; k <= last; ++k) {
    Eigen::VectorXd row = sink.blank();
    row[xi(k)] = -1.0;
    sink.in_rows.push_back(row);
    sink.in_rhs.push_back(-problem.x_floor);
  }

  RowSink::stack(sink.eq_rows, sink.eq_rhs, n, inst.A_eq, inst.b_eq);
  RowSink::stack(sink.in_rows, sink.in_rhs, n, inst.A_in, inst.b_in);

  inst.H = Eigen::MatrixXd::Zero(n, n);
  inst.f = Eigen::VectorXd::Zero(n);
  if (full && problem.costs) {
    for (std::size_t k = 0; k <= last; ++k) {
      const pwq::BivariateQuadratic c = (*problem.costs)[k].normalized();
      inst.H(xi(k), xi(k)) += c.p;
      inst.f[xi(k)] += c.g;
      inst.constant += c.k;
      if (k < last) {
        inst.H(ui(k), ui(k)) += c.r;
        inst.H(xi(k), ui(k)) += c.n;
        inst.H(ui(k), xi(k)) += c.n;
        inst.f[ui(k)] += c.h;
      }
    }
  }
  return inst;
}

LinearProgram as_lp(const DenseInstance& inst) {
  LinearProgram lp;
  lp.A_eq = inst.A_eq;
  lp.b_eq = inst.b_eq;
  lp.A_in = inst.A_in;
  lp.b_in = inst.b_in;
  lp.lower = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(inst.vars()), -kInf);
  return lp;
}

SolutionProfile to_profile(const DenseInstance& inst, const Eigen::VectorXd& z,
                           Objective objective) {
  SolutionProfile p;
  p.objective = objective;
  p.x.resize(inst.N + 1);
  p.u.resize(inst.N);
  for (std::size_t k = 0; k <= inst.N; ++k) p.x[k] = z[static_cast<Eigen::Index>(inst.x(k))];
  for (std::size_t k = 0; k < inst.N; ++k) p.u[k] = z[static_cast<Eigen::Index>(inst.u(k))];
  return p;
}

Eigen::VectorXd feasible_point(const DenseInstance& inst) {
  const LexResult r =
      solve_lexicographic(as_lp(inst), {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.vars()))});
  if (r.status == LpStatus::kInfeasible) {
    throw Infeasible(0, {}, "dense oracle: the constraint set is empty");
  }
  return r.z;
}

struct KktSolve {
  Eigen::VectorXd step;
  Eigen::VectorXd mult;
  double residual = 0.0;
};

// [H A^T; A 0] [p; mu] = [rhs_top; rhs_bottom]
KktSolve solve_kkt(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A,
                   const Eigen::VectorXd& top, const Eigen::VectorXd& bottom) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = A.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = H;
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  Eigen::VectorXd rhs(n + m);
  rhs << top, bottom;
  const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
  KktSolve out;
  out.step = sol.head(n);
  out.mult = sol.tail(m);
  out.residual = (K * sol - rhs).lpNorm<Eigen::Infinity>() /
                 (1.0 + rhs.lpNorm<Eigen::Infinity>());
  return out;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& A_eq, const Eigen::MatrixXd& A_in,
                            const std::vector<std::size_t>& active) {
  Eigen::MatrixXd A(A_eq.rows() + static_cast<Eigen::Index>(active.size()), A_eq.cols());
  A.topRows(A_eq.rows()) = A_eq;
  for (std::size_t i = 0; i < active.size(); ++i) {
    A.row(A_eq.rows() + static_cast<Eigen::Index>(i)) =
        A_in.row(static_cast<Eigen::Index>(active[i]));
  }
  return A;
}

QpSolution package(const DenseInstance& inst, const Eigen::VectorXd& z,
                   const Eigen::VectorXd& mult, const std::vector<std::size_t>& active,
                   std::size_t iterations) {
  QpSolution s;
  s.z = z;
  s.nu = mult.head(inst.A_eq.rows());
  s.lambda = Eigen::VectorXd::Zero(inst.A_in.rows());
  for (std::size_t i = 0; i < active.size(); ++i) {
    s.lambda[static_cast<Eigen::Index>(active[i])] =
        mult[inst.A_eq.rows() + static_cast<Eigen::Index>(i)];
  }
  s.objective = inst.objective(z);
  s.iterations = iterations;
  return s;
}

}  // namespace

LexResult solve_lexicographic(const LinearProgram& lp,
                              const std::vector<Eigen::VectorXd>& objectives) {
  const StandardForm sf = standardize(lp);
  Tableau tab(sf);
  LexResult out;
  if (!tab.phase_one()) {
    out.status = LpStatus::kInfeasible;
    return out;
  }
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (tab.optimize(sf.cost(objectives[i])) == LpStatus::kUnbounded) {
      out.status = LpStatus::kUnbounded;
      out.unbounded_at = i;
      return out;
    }
    tab.lock_optimal_face();
  }
  out.z = sf.recover(tab.solution());
  for (const Eigen::VectorXd& c : objectives) out.values.push_back(c.dot(out.z));
  return out;
}

double DenseInstance::objective(const Eigen::VectorXd& z) const {
  return 0.5 * z.dot(H * z) + f.dot(z) + constant;
}

DenseInstance make_dense(const DiscretizedProblem& problem) {
  require_valid(problem);
  return build(problem, problem.horizon(), true);
}

DenseInstance make_dense_prefix(const DiscretizedProblem& problem, std::size_t k) {
  require_valid(problem);
  if (k > problem.horizon()) throw InvalidProblem("prefix index beyond the horizon");
  return build(problem, k, false);
}

SolutionProfile topp_oracle(const DiscretizedProblem& problem) {
  if (problem.horizon() > kMaxToppOracleSteps) {
    throw UnsupportedDimension("TOPP oracle is limited to N <= " +
                         std::to_string(kMaxToppOracleSteps));
  }
  const DenseInstance inst = make_dense(problem);
  const auto n = static_cast<Eigen::Index>(inst.vars());
  std::vector<Eigen::VectorXd> objectives;
  for (std::size_t k = inst.N + 1; k-- > 0;) {
    objectives.push_back(-Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(inst.x(k))));
  }
  const LexResult r = solve_lexicographic(as_lp(inst), objectives);
  if (r.status == LpStatus::kInfeasible) {
    throw Infeasible(0, {}, "dense oracle: the constraint set is empty");
  }
  if (r.status == LpStatus::kUnbounded) {
    throw Unbounded("dense oracle: x_" + std::to_string(inst.N - r.unbounded_at) +
                    " is unbounded above");
  }
  return to_profile(inst, r.z, Objective::kTopp);
}

std::vector<Interval> reach_oracle(const DiscretizedProblem& problem) {
  require_valid(problem);
  std::vector<Interval> out;
  for (std::size_t k = 0; k <= problem.horizon(); ++k) {
    const DenseInstance inst = build(problem, k, false);
    const LinearProgram lp = as_lp(inst);
    const Eigen::VectorXd e =
        Eigen::VectorXd::Unit(static_cast<Eigen::Index>(inst.vars()),
                              static_cast<Eigen::Index>(inst.x(k)));
    const LexResult lo = solve_lexicographic(lp, {e});
    if (lo.status == LpStatus::kInfeasible) {
      out.resize(problem.horizon() + 1, Interval::Empty());
      return out;
    }
    const LexResult hi = solve_lexicographic(lp, {-e});
    out.push_back({lo.status == LpStatus::kUnbounded ? -kInf : lo.values[0],
                   hi.status == LpStatus::kUnbounded ? kInf : -hi.values[0]});
  }
  return out;
}

double KktReport::max() const {
  return std::max({stationarity, primal, dual, complementarity});
}

KktReport kkt_residuals(const DenseInstance& inst, const QpSolution& sol) {
  KktReport r;
  const Eigen::VectorXd Hz = inst.H * sol.z;
  Eigen::VectorXd grad = Hz + inst.f;
  if (inst.A_eq.rows() > 0) grad += inst.A_eq.transpose() * sol.nu;
  if (inst.A_in.rows() > 0) grad += inst.A_in.transpose() * sol.lambda;
  r.stationarity = grad.lpNorm<Eigen::Infinity>() /
                   (1.0 + Hz.lpNorm<Eigen::Infinity>() + inst.f.lpNorm<Eigen::Infinity>());
  if (inst.A_eq.rows() > 0) {
    r.primal = (inst.A_eq * sol.z - inst.b_eq).lpNorm<Eigen::Infinity>();
  }
  if (inst.A_in.rows() > 0) {
    const Eigen::VectorXd slack = inst.b_in - inst.A_in * sol.z;
    r.primal = std::max(r.primal, std::max(0.0, -slack.minCoeff()));
    r.dual = std::max(0.0, -sol.lambda.minCoeff());
    r.complementarity = sol.lambda.cwiseProduct(slack).cwiseAbs().maxCoeff();
  }
  return r;
}

QpSolution solve_qp_active_set(const DenseInstance& inst, std::size_t max_iterations) {
  Eigen::VectorXd z = feasible_point(inst);
  const Eigen::Index m_in = inst.A_in.rows();
  std::vector<std::size_t> active;
  std::vector<char> in_set(static_cast<std::size_t>(m_in), 0);

  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    const Eigen::VectorXd g = inst.H * z + inst.f;
    const Eigen::MatrixXd A = gather_rows(inst.A_eq, inst.A_in, active);
    const KktSolve kkt = solve_kkt(inst.H, A, -g, Eigen::VectorXd::Zero(A.rows()));
    if (kkt.residual > 1e-9) {
      throw NotConverged("dense QP: singular reduced Hessian on the working set");
    }
    const Eigen::VectorXd& p = kkt.step;
    const double scale = 1.0 + z.lpNorm<Eigen::Infinity>();

    if (p.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) {
      z += p;
      const double tol = 1e-12 * (1.0 + g.lpNorm<Eigen::Infinity>());
      std::size_t drop = active.size();
      double most = -tol;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const double lambda = kkt.mult[inst.A_eq.rows() + static_cast<Eigen::Index>(i)];
        if (lambda < most) {
          most = lambda;
          drop = i;
        }
      }
      if (drop == active.size()) return package(inst, z, kkt.mult, active, iter);
      in_set[active[drop]] = 0;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      continue;
    }

    double alpha = 1.0;
    Eigen::Index block = -1;
    for (Eigen::Index i = 0; i < m_in; ++i) {
      if (in_set[static_cast<std::size_t>(i)]) continue;
      const double ap = inst.A_in.row(i).dot(p);
      if (ap <= 1e-14 * inst.A_in.row(i).lpNorm<Eigen::Infinity>() * p.lpNorm<Eigen::Infinity>()) {
        continue;
      }
      const double t = std::max(0.0, inst.b_in[i] - inst.A_in.row(i).dot(z)) / ap;
      if (t < alpha) {
        alpha = t;
        block = i;
      }
    }
    z += alpha * p;
    if (block >= 0) {
      active.push_back(static_cast<std::size_t>(block));
      in_set[static_cast<std::size_t>(block)] = 1;
    }
  }
  throw NotConverged("dense QP: active-set iteration limit reached");
}

QpSolution solve_qp_enumeration(const DenseInstance& inst) {
  const auto m_in = static_cast<std::size_t>(inst.A_in.rows());
  if (m_in > kMaxEnumerated) {
    throw UnsupportedDimension("enumeration is limited to " + std::to_string(kMaxEnumerated) +
                               " inequalities, got " + std::to_string(m_in));
  }
  std::vector<std::uint32_t> masks(std::size_t{1} << m_in);
  std::iota(masks.begin(), masks.end(), 0u);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return __builtin_popcount(a) < __builtin_popcount(b);
  });

  const double scale = 1.0 + inst.f.lpNorm<Eigen::Infinity>() +
                       (inst.b_in.size() ? inst.b_in.lpNorm<Eigen::Infinity>() : 0.0);
  std::size_t tried = 0;
  for (std::uint32_t mask : masks) {
    ++tried;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < m_in; ++i) {
      if (mask & (1u << i)) active.push_back(i);
    }
    const Eigen::MatrixXd A = gather_rows(inst.A_eq, inst.A_in, active);
    Eigen::VectorXd b(A.rows());
    b.head(inst.b_eq.size()) = inst.b_eq;
    for (std::size_t i = 0; i < active.size(); ++i) {
      b[inst.b_eq.size() + static_cast<Eigen::Index>(i)] =
          inst.b_in[static_cast<Eigen::Index>(active[i])];
    }
    const KktSolve kkt = solve_kkt(inst.H, A, -inst.f, b);
    if (kkt.residual > 1e-10) continue;
    const Eigen::VectorXd& z = kkt.step;
    bool ok = true;
    for (std::size_t i = 0; i < active.size() && ok; ++i) {
      ok = kkt.mult[inst.A_eq.rows() + static_cast<Eigen::Index>(i)] >= -1e-10 * scale;
    }
    if (ok && m_in > 0) ok = (inst.A_in * z - inst.b_in).maxCoeff() <= 1e-10 * scale;
    if (ok) return package(inst, z, kkt.mult, active, tried);
  }
  throw Infeasible(0, {}, "dense oracle: no active set satisfies the KKT conditions");
}

SolutionProfile qopp_oracle(const DiscretizedProblem& problem, QpMethod method) {
  if (!problem.has_costs()) throw InvalidProblem("QOPP oracle requires costs");
  if (problem.horizon() > kMaxQoppOracleSteps) {
    throw UnsupportedDimension("QOPP oracle is limited to N <= " +
                         std::to_string(kMaxQoppOracleSteps));
  }
  const DenseInstance inst = make_dense(problem);
  const QpSolution sol = method == QpMethod::kActiveSet ? solve_qp_active_set(inst)
                                                        : solve_qp_enumeration(inst);
  const KktReport kkt = kkt_residuals(inst, sol);
  if (kkt.max() > kKktTolerance) {
    throw NotConverged("dense QP: KKT residual " + std::to_string(kkt.max()) +
                       " exceeds tolerance");
  }
  SolutionProfile p = to_profile(inst, sol.z, Objective::kQuadratic);
  p.objective_value = sol.objective;
  return p;
}

}  // namespace qopp::oracle
