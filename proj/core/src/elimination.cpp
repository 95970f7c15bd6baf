#include "qopp/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qopp/errors.hpp"

namespace qopp {

std::string to_string(Objective o) {
  switch (o) {
    case Objective::kAuto: return "auto";
    case Objective::kTopp: return "topp";
    case Objective::kQuadratic: return "quadratic";
  }
  return "auto";
}

Objective objective_from_string(const std::string& s) {
  if (s == "auto") return Objective::kAuto;
  if (s == "topp") return Objective::kTopp;
  if (s == "quadratic") return Objective::kQuadratic;
  throw InvalidProblem("unknown objective '" + s + "' (expected topp|quadratic|auto)");
}

Interval XConditionalTopp::feasible(double x_next) const {
  std::vector<lp2d::Row1> r;
  r.reserve(rows.rows.size());
  for (const lp2d::Halfplane2& h : rows.rows) {
    r.push_back({h.alpha, h.gamma - h.beta * x_next});
  }
  return lp2d::clamp_1d(r, reach);
}

UConditional eliminate_u(std::size_t k, double delta_s) {
  return {k, 1.0 / (2.0 * delta_s)};
}

ReducedRows reduce_rows(const DiscretizedStep& step, double delta_s) {
  const double s = 1.0 / (2.0 * delta_s);
  ReducedRows out;
  out.rows.reserve(2 * step.rows());
  out.source.reserve(2 * step.rows());
  for (std::size_t i = 0; i < step.rows(); ++i) {
    const double ax = step.b[i] - step.a[i] * s;
    const double ay = step.a[i] * s;
    if (std::isfinite(step.hi[i])) {
      out.rows.push_back({ax, ay, step.hi[i] - step.c[i]});
      out.source.push_back(i);
    }
    if (std::isfinite(step.lo[i])) {
      out.rows.push_back({-ax, -ay, step.c[i] - step.lo[i]});
      out.source.push_back(i);
    }
  }
  return out;
}

pwq::BivariateQuadratic reduce_cost(const QuadraticStepCost& cost, double delta_s) {
  const pwq::BivariateQuadratic c = cost.normalized();  // in (x, u)
  const double s = 1.0 / (2.0 * delta_s);
  // u = s*(y - x)
  pwq::BivariateQuadratic out;
  out.p = c.p + c.r * s * s - 2.0 * c.n * s;
  out.r = c.r * s * s;
  out.n = -c.r * s * s + c.n * s;
  out.g = c.g - c.h * s;
  out.h = c.h * s;
  out.k = c.k;
  return out;
}

namespace {

Interval next_floor(double x_floor) { return Interval::AtLeast(x_floor); }

std::vector<std::size_t> offending_rows(const ReducedRows& rows, const Interval& reach,
                                        const Interval& y_box) {
  std::set<std::size_t> bad;
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    const lp2d::Halfplane2 one[] = {rows.rows[i]};
    if (lp2d::extremize_y(one, reach, y_box).empty()) bad.insert(rows.source[i]);
  }
  if (bad.empty()) bad.insert(rows.source.begin(), rows.source.end());
  return {bad.begin(), bad.end()};
}

[[noreturn]] void throw_infeasible(std::size_t k, const ReducedRows& rows,
                                   const Interval& reach, const Interval& y_box) {
  throw Infeasible(k, offending_rows(rows, reach, y_box),
                   "infeasible at step " + std::to_string(k) +
                       ": no admissible x_" + std::to_string(k + 1));
}

Interval propagate_reach(const ReducedRows& rows, const Interval& reach, double x_floor) {
  return lp2d::extremize_y(rows.rows, reach, next_floor(x_floor));
}

Interval terminal_interval(const DiscretizedProblem& problem, const Interval& reach_N) {
  const DiscretizedStep& last = problem.steps.back();
  std::vector<lp2d::Row1> rows;
  for (std::size_t i = 0; i < last.rows(); ++i) {
    // u_N := 0
    if (std::isfinite(last.hi[i])) rows.push_back({last.b[i], last.hi[i] - last.c[i]});
    if (std::isfinite(last.lo[i])) rows.push_back({-last.b[i], last.c[i] - last.lo[i]});
  }
  return lp2d::clamp_1d(rows, reach_N.intersect(problem.boundary.xN));
}

[[noreturn]] void throw_terminal_infeasible(const DiscretizedProblem& problem,
                                            const Interval& reach_N) {
  const std::size_t N = problem.horizon();
  const Interval box = reach_N.intersect(problem.boundary.xN);
  std::vector<std::size_t> bad;
  const DiscretizedStep& last = problem.steps.back();
  for (std::size_t i = 0; i < last.rows(); ++i) {
    std::vector<lp2d::Row1> r;
    if (std::isfinite(last.hi[i])) r.push_back({last.b[i], last.hi[i] - last.c[i]});
    if (std::isfinite(last.lo[i])) r.push_back({-last.b[i], last.c[i] - last.lo[i]});
    if (lp2d::clamp_1d(r, box).empty()) bad.push_back(i);
  }
  if (bad.empty()) {
    for (std::size_t i = 0; i < last.rows(); ++i) bad.push_back(i);
  }
  throw Infeasible(N, std::move(bad),
                   "infeasible at step " + std::to_string(N) +
                       ": terminal rows and boundary admit no x_N");
}

Objective resolve(const DiscretizedProblem& problem, Objective requested) {
  if (requested == Objective::kAuto) {
    return problem.has_costs() ? Objective::kQuadratic : Objective::kTopp;
  }
  if (requested == Objective::kQuadratic && !problem.has_costs()) {
    throw InvalidProblem("quadratic objective requested but the problem has no costs");
  }
  return requested;
}

}  // namespace

ToppStepResult eliminate_x_topp(std::size_t k, ReducedRows rows, const Interval& reach,
                                double x_floor) {
  if (reach.empty()) {
    throw Infeasible(k, {}, "infeasible at step " + std::to_string(k) +
                                ": empty incoming reach interval");
  }
  const Interval next = propagate_reach(rows, reach, x_floor);
  if (next.empty()) throw_infeasible(k, rows, reach, next_floor(x_floor));
  return {XConditionalTopp{k, std::move(rows), reach}, next};
}

QoppStepResult eliminate_x_qopp(std::size_t k, ReducedRows rows,
                                const pwq::BivariateQuadratic& stage_cost,
                                const pwq::PiecewiseQuadratic& incoming,
                                const Interval& reach, double x_floor) {
  if (reach.empty()) {
    throw Infeasible(k, {}, "infeasible at step " + std::to_string(k) +
                                ": empty incoming reach interval");
  }
  const Interval next = propagate_reach(rows, reach, x_floor);
  if (next.empty()) throw_infeasible(k, rows, reach, next_floor(x_floor));
  pwq::Elimination e;
  try {
    e = pwq::eliminate_min(stage_cost, rows.rows, reach, incoming, next_floor(x_floor));
  } catch (const Infeasible&) {
    throw_infeasible(k, rows, reach, next_floor(x_floor));
  } catch (const NonConvex& ex) {
    throw NonConvex(k, "step " + std::to_string(k) + ": " + ex.what());
  }
  return {XConditionalQopp{k, std::move(e.conditional), std::move(rows)},
          std::move(e.value), next};
}

BayesNet eliminate(const DiscretizedProblem& problem, Objective objective) {
  const std::vector<std::string> diagnostics = validate(problem);
  if (!diagnostics.empty()) {
    throw InvalidProblem("invalid problem: " + diagnostics.front(), diagnostics);
  }
  BayesNet net;
  net.objective = resolve(problem, objective);
  const std::size_t N = problem.horizon();
  net.u.reserve(N);
  net.reach.reserve(N + 1);

  Interval reach = problem.boundary.x0.intersect(Interval::AtLeast(problem.x_floor));
  if (reach.empty()) {
    throw Infeasible(0, {}, "infeasible at step 0: boundary x0 lies below x_floor");
  }
  net.reach.push_back(reach);

  if (net.objective == Objective::kTopp) {
    net.topp.reserve(N);
    for (std::size_t k = 0; k < N; ++k) {
      net.u.push_back(eliminate_u(k, problem.delta_s[k]));
      ToppStepResult r = eliminate_x_topp(k, reduce_rows(problem.steps[k], problem.delta_s[k]),
                                          reach, problem.x_floor);
      reach = r.next_reach;
      net.topp.push_back(std::move(r.conditional));
      net.reach.push_back(reach);
    }
  } else {
    net.qopp.reserve(N);
    net.segment_counts.reserve(N);
    const auto& costs = *problem.costs;
    pwq::PiecewiseQuadratic cost_to_go(reach, pwq::Quadratic{});
    for (std::size_t k = 0; k < N; ++k) {
      net.u.push_back(eliminate_u(k, problem.delta_s[k]));
      QoppStepResult r = eliminate_x_qopp(
          k, reduce_rows(problem.steps[k], problem.delta_s[k]),
          reduce_cost(costs[k], problem.delta_s[k]), cost_to_go, reach, problem.x_floor);
      reach = r.next_reach;
      cost_to_go = std::move(r.cost_to_go);
      net.segment_counts.push_back(cost_to_go.size());
      net.qopp.push_back(std::move(r.conditional));
      net.reach.push_back(reach);
    }
    net.terminal_cost = std::move(cost_to_go);
  }

  net.terminal = terminal_interval(problem, reach);
  if (net.terminal.empty()) throw_terminal_infeasible(problem, reach);
  if (net.terminal_cost) {
    const pwq::BivariateQuadratic last = problem.costs->back().normalized();
    net.terminal_cost =
        pwq::add(pwq::restrict(*net.terminal_cost, net.terminal),
                 pwq::Quadratic{0.5 * last.p, last.g, last.k});
  }
  return net;
}

SolutionProfile backsubstitute(const BayesNet& net, const DiscretizedProblem& problem) {
  const std::size_t N = problem.horizon();
  if (net.u.size() != N || net.reach.size() != N + 1) {
    throw InvalidProblem("backsubstitute: Bayes net does not match the problem horizon");
  }
  if (net.terminal.empty()) throw Infeasible(N, {}, "backsubstitute: empty terminal marginal");

  SolutionProfile out;
  out.objective = net.objective;
  out.x.assign(N + 1, 0.0);
  out.u.assign(N, 0.0);

  if (net.objective == Objective::kTopp) {
    if (!net.terminal.bounded_above()) {
      throw Unbounded("x_N is unbounded above; add a velocity limit or a terminal bound");
    }
    out.x[N] = net.terminal.hi;
    for (std::size_t k = N; k-- > 0;) {
      const Interval feasible = net.topp[k].feasible(out.x[k + 1]);
      if (feasible.empty()) {
        throw Infeasible(k, {}, "backsubstitute: empty interval at step " + std::to_string(k));
      }
      if (!feasible.bounded_above()) {
        throw Unbounded("x_" + std::to_string(k) + " is unbounded above given x_" +
                        std::to_string(k + 1));
      }
      out.x[k] = feasible.hi;
    }
  } else {
    if (!net.terminal_cost) throw InvalidProblem("backsubstitute: missing terminal cost");
    out.x[N] = pwq::minimize(*net.terminal_cost).argmin;
    for (std::size_t k = N; k-- > 0;) {
      out.x[k] = pwq::evaluate(net.qopp[k].conditional, out.x[k + 1]);
    }
  }
  for (std::size_t k = 0; k < N; ++k) out.u[k] = net.u[k](out.x[k], out.x[k + 1]);

  out.diagnostics.reach = net.reach;
  out.diagnostics.segment_counts = net.segment_counts;
  const Residuals r = residuals(problem, out.x, out.u);
  out.diagnostics.max_row_violation = r.max_row_violation;
  out.diagnostics.max_dynamics_residual = r.max_dynamics_residual;
  if (net.objective == Objective::kQuadratic) {
    out.objective_value = objective_value(problem, out.x, out.u);
  }
  return out;
}

SolutionProfile solve(const DiscretizedProblem& problem, Objective objective) {
  return backsubstitute(eliminate(problem, objective), problem);
}

Residuals residuals(const DiscretizedProblem& problem, const std::vector<double>& x,
                    const std::vector<double>& u) {
  Residuals r;
  const std::size_t N = problem.horizon();
  for (std::size_t k = 0; k <= N; ++k) {
    const DiscretizedStep& s = problem.steps[k];
    const double uk = k < N ? u[k] : 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i) {
      const double v = s.a[i] * uk + s.b[i] * x[k] + s.c[i];
      r.max_row_violation = std::max({r.max_row_violation, s.lo[i] - v, v - s.hi[i]});
    }
    r.max_row_violation = std::max(r.max_row_violation, problem.x_floor - x[k]);
  }
  r.max_row_violation = std::max({r.max_row_violation, problem.boundary.x0.lo - x[0],
                                  x[0] - problem.boundary.x0.hi,
                                  problem.boundary.xN.lo - x[N], x[N] - problem.boundary.xN.hi});
  for (std::size_t k = 0; k < N; ++k) {
    const double res = std::abs(x[k + 1] - x[k] - 2.0 * u[k] * problem.delta_s[k]);
    r.max_dynamics_residual =
        std::max(r.max_dynamics_residual, res / std::max(1.0, std::abs(x[k])));
  }
  return r;
}

double objective_value(const DiscretizedProblem& problem, const std::vector<double>& x,
                       const std::vector<double>& u) {
  if (!problem.costs) throw InvalidProblem("objective_value: problem has no costs");
  const std::size_t N = problem.horizon();
  double total = 0.0;
  for (std::size_t k = 0; k <= N; ++k) {
    total += (*problem.costs)[k](x[k], k < N ? u[k] : 0.0);
  }
  return total;
}

}  // namespace qopp
