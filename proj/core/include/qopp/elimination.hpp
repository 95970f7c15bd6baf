#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qopp/interval.hpp"
#include "qopp/lp2d.hpp"
#include "qopp/problem.hpp"
#include "qopp/pwq.hpp"

namespace qopp {

enum class Objective { kAuto, kTopp, kQuadratic };

std::string to_string(Objective o);
/// "topp", "quadratic" or "auto"; throws InvalidProblem otherwise.
Objective objective_from_string(const std::string& s);

/// u_k*(x_k, x_{k+1}) = (x_{k+1} - x_k) / (2 ds_k); the dynamics leave no
/// freedom in u.
struct UConditional {
  std::size_t step = 0;
  double inv_two_ds = 0.0;

  double operator()(double x_k, double x_next) const {
    return (x_next - x_k) * inv_two_ds;
  }
};

/// Step rows after substituting u_k, as halfplanes in (x_k, x_{k+1}).
/// source[i] is the DiscretizedStep row that produced rows[i].
struct ReducedRows {
  std::vector<lp2d::Halfplane2> rows;
  std::vector<std::size_t> source;
};

/// Maximize x_k subject to the reduced rows and x_k in reach; solved only
/// during back-substitution.
struct XConditionalTopp {
  std::size_t step = 0;
  ReducedRows rows;
  Interval reach;

  /// Feasible x_k values once x_{k+1} is known.
  Interval feasible(double x_next) const;
};

struct XConditionalQopp {
  std::size_t step = 0;
  pwq::PiecewiseLinear conditional;  ///< x_k*(x_{k+1}) on reach_{k+1}
  ReducedRows rows;
};

/// Ordered result of the forward pass.
struct BayesNet {
  Objective objective = Objective::kTopp;
  std::vector<UConditional> u;
  std::vector<XConditionalTopp> topp;  ///< populated for kTopp
  std::vector<XConditionalQopp> qopp;  ///< populated for kQuadratic
  std::vector<Interval> reach;         ///< N + 1 reach intervals
  Interval terminal;                   ///< admissible x_N
  std::optional<pwq::PiecewiseQuadratic> terminal_cost;
  std::vector<std::size_t> segment_counts;  ///< cost-to-go segments on x_1..x_N
};

struct SolutionDiagnostics {
  std::vector<Interval> reach;
  std::vector<std::size_t> segment_counts;
  double max_row_violation = 0.0;
  double max_dynamics_residual = 0.0;
};

struct SolutionProfile {
  Objective objective = Objective::kTopp;
  std::vector<double> x;  ///< N + 1 squared path speeds
  std::vector<double> u;  ///< N path accelerations
  std::optional<double> objective_value;
  SolutionDiagnostics diagnostics;
};

UConditional eliminate_u(std::size_t k, double delta_s);

/// a*u + b*x + c in [lo, hi] with u = (y - x)/(2 ds) becomes
/// (b - a/(2ds))*x + (a/(2ds))*y + c in [lo, hi]; one halfplane per finite
/// bound.
ReducedRows reduce_rows(const DiscretizedStep& step, double delta_s);

/// Stage cost in (x_k, x_{k+1}) after substituting u_k.
pwq::BivariateQuadratic reduce_cost(const QuadraticStepCost& cost, double delta_s);

struct ToppStepResult {
  XConditionalTopp conditional;
  Interval next_reach;
};

/// Reach interval of x_{k+1} from two 2-D LPs. Throws Infeasible{k}.
ToppStepResult eliminate_x_topp(std::size_t k, ReducedRows rows, const Interval& reach,
                                double x_floor);

struct QoppStepResult {
  XConditionalQopp conditional;
  pwq::PiecewiseQuadratic cost_to_go;  ///< on x_{k+1}
  Interval next_reach;
};

/// Parametric elimination of x_k against the incoming cost-to-go. The reach
/// interval is computed exactly as in eliminate_x_topp. Throws Infeasible{k}
/// or NonConvex{k}.
QoppStepResult eliminate_x_qopp(std::size_t k, ReducedRows rows,
                                const pwq::BivariateQuadratic& stage_cost,
                                const pwq::PiecewiseQuadratic& incoming,
                                const Interval& reach, double x_floor);

/// Forward pass in the order u_0, x_0, u_1, x_1, ..., x_N.
BayesNet eliminate(const DiscretizedProblem& problem, Objective objective = Objective::kAuto);

SolutionProfile backsubstitute(const BayesNet& net, const DiscretizedProblem& problem);

/// validate + eliminate + backsubstitute. Costs present selects the quadratic
/// strategy under kAuto. Throws InvalidProblem, Infeasible, NonConvex, and
/// Unbounded when TOPP has no upper bound on some x_k.
SolutionProfile solve(const DiscretizedProblem& problem, Objective objective = Objective::kAuto);

struct Residuals {
  double max_row_violation = 0.0;      ///< absolute
  double max_dynamics_residual = 0.0;  ///< relative to max(1, |x_k|)
};

Residuals residuals(const DiscretizedProblem& problem, const std::vector<double>& x,
                    const std::vector<double>& u);

/// Sum of stage costs with u_N := 0. Requires costs.
double objective_value(const DiscretizedProblem& problem, const std::vector<double>& x,
                       const std::vector<double>& u);

}  // namespace qopp
