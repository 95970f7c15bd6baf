#pragma once

#include <span>
#include <vector>

#include "qopp/interval.hpp"

namespace qopp::lp2d {

/// alpha * x + beta * y <= gamma. With alpha == beta == 0 the row is a
/// constant feasibility check (gamma < 0 means infeasible).
struct Halfplane2 {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// alpha * x <= gamma.
struct Row1 {
  double alpha = 0.0;
  double gamma = 0.0;
};

/// Relative slack used by every feasibility test in this module.
inline constexpr double kFeasibilitySlack = 1e-12;

/// Exact range of y over {(x, y) : rows hold, x in x_box, y in y_box}.
///
/// Returns Interval::Empty() if the set is empty. An infinite endpoint is the
/// unbounded marker: y is unbounded in that direction and no box applies.
/// Uses vertex enumeration over constraint-pair intersections, which is
/// quadratic in the row count and intended for the small per-step systems of
/// the retiming problem.
Interval extremize_y(std::span<const Halfplane2> rows, const Interval& x_box,
                     const Interval& y_box);

/// Same as extremize_y with the roles of x and y exchanged.
Interval extremize_x(std::span<const Halfplane2> rows, const Interval& x_box,
                     const Interval& y_box);

/// Intersection of box with every bound implied by rows. Contradictions
/// smaller than the feasibility slack collapse to the midpoint.
Interval clamp_1d(std::span<const Row1> rows, const Interval& box);

/// True if (x, y) satisfies the row within the module's relative slack.
bool satisfies(const Halfplane2& row, double x, double y);

}  // namespace qopp::lp2d
