#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "qopp/elimination.hpp"
#include "qopp/interval.hpp"
#include "qopp/problem.hpp"

/// Dense reference solvers for small instances. They share no code with the
/// elimination solver beyond the problem types.
namespace qopp::oracle {

/// min c^T z  s.t.  A_eq z = b_eq, A_in z <= b_in, z >= lower (entries of
/// lower may be -inf).
struct LinearProgram {
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lower;

  std::size_t vars() const { return static_cast<std::size_t>(lower.size()); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LexResult {
  LpStatus status = LpStatus::kOptimal;
  Eigen::VectorXd z;              ///< valid when status is kOptimal
  std::vector<double> values;     ///< optimal value of each objective
  std::size_t unbounded_at = 0;   ///< objective index when kUnbounded
};

/// Minimizes objectives[0], then objectives[1] over the optimal face of the
/// first, and so on. Two-phase tableau simplex; after each stage, nonbasic
/// columns with positive reduced cost are fixed at zero, which restricts the
/// next stage to the current optimal face exactly.
LexResult solve_lexicographic(const LinearProgram& lp,
                              const std::vector<Eigen::VectorXd>& objectives);

/// The problem stated over z = (x_0..x_N, u_0..u_{N-1}).
struct DenseInstance {
  std::size_t N = 0;
  Eigen::MatrixXd A_eq;  ///< dynamics, then equality rows and fixed boundaries
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;  ///< one row per finite one-sided bound, plus x_floor
  Eigen::VectorXd b_in;
  Eigen::MatrixXd H;     ///< objective 0.5 z^T H z + f^T z + constant
  Eigen::VectorXd f;
  double constant = 0.0;

  std::size_t vars() const { return 2 * N + 1; }
  static std::size_t x(std::size_t k) { return k; }
  std::size_t u(std::size_t k) const { return N + 1 + k; }
  double objective(const Eigen::VectorXd& z) const;
};

/// Builds the dense form. With prefix = k < N only x_0..x_k, u_0..u_{k-1},
/// the rows of steps 0..k-1, the floor and x_0's boundary are kept; this is
/// the set whose projection on x_k is the reach interval.
DenseInstance make_dense(const DiscretizedProblem& problem);
DenseInstance make_dense_prefix(const DiscretizedProblem& problem, std::size_t k);

/// Greedy-lexicographic TOPP solution: maximize x_N, fix, maximize x_{N-1},
/// ... Requires N <= 50. Throws Infeasible, Unbounded.
SolutionProfile topp_oracle(const DiscretizedProblem& problem);

/// [min x_k, max x_k] over the prefix feasible set, for k = 0..N.
/// Unbounded directions give infinite ends; an empty prefix gives empty
/// intervals from that index on.
std::vector<Interval> reach_oracle(const DiscretizedProblem& problem);

struct QpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd nu;      ///< equality multipliers
  Eigen::VectorXd lambda;  ///< inequality multipliers, >= 0
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct KktReport {
  double stationarity = 0.0;     ///< relative to 1 + |Hz|_inf + |f|_inf
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double max() const;
};

KktReport kkt_residuals(const DenseInstance& inst, const QpSolution& sol);

/// Primal active-set method from a phase-one vertex. Throws Infeasible,
/// Unbounded, NotConverged.
QpSolution solve_qp_active_set(const DenseInstance& inst, std::size_t max_iterations = 20000);

/// Tries every subset of inequalities as the active set, smallest first.
/// Throws UnsupportedDimension above kMaxEnumerated inequalities.
inline constexpr std::size_t kMaxEnumerated = 18;
QpSolution solve_qp_enumeration(const DenseInstance& inst);

enum class QpMethod { kActiveSet, kEnumeration };

/// Dense convex QP over the full problem. Requires costs and N <= 30.
/// The result is KKT-certified within 1e-8; otherwise NotConverged.
SolutionProfile qopp_oracle(const DiscretizedProblem& problem,
                            QpMethod method = QpMethod::kActiveSet);

inline constexpr std::size_t kMaxToppOracleSteps = 50;
inline constexpr std::size_t kMaxQoppOracleSteps = 30;
inline constexpr double kKktTolerance = 1e-8;

}  // namespace qopp::oracle
