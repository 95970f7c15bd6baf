#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qopp/interval.hpp"
#include "qopp/lp2d.hpp"

namespace qopp::pwq {

/// a*(z - z0)^2 + b*(z - z0) + c. Segments are kept centered inside their
/// interval; in absolute coordinates, narrow segments with large curvature
/// lose every significant digit to cancellation.
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double z0 = 0.0;

  double operator()(double z) const {
    const double d = z - z0;
    return (a * d + b) * d + c;
  }
  double derivative(double z) const { return 2.0 * a * (z - z0) + b; }
  /// The same function expanded about z1.
  Quadratic recentered(double z1) const {
    const double d = z1 - z0;
    return {a, 2.0 * a * d + b, (a * d + b) * d + c, z1};
  }
  Quadratic& operator+=(const Quadratic& o) {
    const Quadratic r = o.recentered(z0);
    a += r.a;
    b += r.b;
    c += r.c;
    return *this;
  }
  friend bool operator==(const Quadratic&, const Quadratic&) = default;
};

/// slope*z + intercept
struct Linear {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double z) const { return slope * z + intercept; }
  friend bool operator==(const Linear&, const Linear&) = default;
};

/// Scalar piecewise function on a closed domain. Segment i covers
/// [breaks[i], breaks[i+1]]; outside the domain the function is undefined
/// (+inf for quadratics, see PiecewiseQuadratic::operator()).
template <typename Segment>
class Piecewise {
 public:
  Piecewise() = default;

  /// Single segment covering domain.
  Piecewise(const Interval& domain, const Segment& seg) {
    if (!domain.empty()) {
      breaks_ = {domain.lo, domain.hi};
      segments_ = {seg};
    }
  }

  /// breaks.size() must be segments.size() + 1 and non-decreasing.
  Piecewise(std::vector<double> breaks, std::vector<Segment> segments);

  bool empty() const { return segments_.empty(); }
  Interval domain() const {
    return empty() ? Interval::Empty() : Interval{breaks_.front(), breaks_.back()};
  }
  std::size_t size() const { return segments_.size(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(std::size_t i) const { return segments_[i]; }
  Interval segment_interval(std::size_t i) const {
    return {breaks_[i], breaks_[i + 1]};
  }

  /// Index of the segment containing z (z clamped into the domain). Points on
  /// an interior breakpoint resolve to the segment on the right.
  std::size_t locate(double z) const;

  /// Evaluates the owning segment at z; z must lie in the domain.
  double eval_inside(double z) const { return segments_[locate(z)](z); }

 private:
  std::vector<double> breaks_;
  std::vector<Segment> segments_;
};

extern template class Piecewise<Quadratic>;
extern template class Piecewise<Linear>;

using PiecewiseQuadratic = Piecewise<Quadratic>;
using PiecewiseLinear = Piecewise<Linear>;

/// f(z), or +inf outside the domain.
double evaluate(const PiecewiseQuadratic& f, double z);
/// f(z); z is clamped into the domain.
double evaluate(const PiecewiseLinear& f, double z);

/// 0.5*p*x^2 + 0.5*r*y^2 + n*x*y + g*x + h*y + k
struct BivariateQuadratic {
  double p = 0.0;
  double r = 0.0;
  double n = 0.0;
  double g = 0.0;
  double h = 0.0;
  double k = 0.0;

  double operator()(double x, double y) const {
    return 0.5 * p * x * x + 0.5 * r * y * y + n * x * y + g * x + h * y + k;
  }
  /// [[p, n], [n, r]] is positive semidefinite within a relative tolerance.
  bool is_psd(double rel_tol = 1e-12) const;
};

/// Pointwise sum on the intersection of the domains.
/// Throws EmptyDomain when the domains are disjoint.
PiecewiseQuadratic add(const PiecewiseQuadratic& f, const PiecewiseQuadratic& g);

/// Restriction to a sub-interval. Throws EmptyDomain when disjoint.
PiecewiseQuadratic restrict(const PiecewiseQuadratic& f, const Interval& to);

/// f(z) + q(z) on f's domain.
PiecewiseQuadratic add(const PiecewiseQuadratic& f, const Quadratic& q);

struct Minimum {
  double argmin = 0.0;
  double value = 0.0;
};

/// Global minimizer of a convex piecewise quadratic; exact ties resolve to the
/// smallest argument. Throws EmptyDomain or Unbounded.
Minimum minimize(const PiecewiseQuadratic& f);

/// Merges adjacent segments whose coefficients agree within 1e-10 relative
/// and drops segments narrower than 1e-12 of the domain scale.
PiecewiseQuadratic prune(const PiecewiseQuadratic& f);
PiecewiseLinear prune(const PiecewiseLinear& f);

/// Left derivative <= right derivative at every breakpoint and a >= -1e-12 on
/// every segment, both within tol relative to the local slope magnitude.
bool is_convex(const PiecewiseQuadratic& f, double tol = 1e-9);

/// Largest jump between adjacent segments at shared breakpoints, relative to
/// max(1, |value|).
double continuity_defect(const PiecewiseQuadratic& f);
double continuity_defect(const PiecewiseLinear& f);

struct Elimination {
  PiecewiseLinear conditional;  ///< x*(y)
  PiecewiseQuadratic value;     ///< min over feasible x of prior(x) + q(x, y)
};

/// Parametric minimization of prior(x) + q(x, y) over x subject to
/// rows(x, y), x in x_box and x in prior's domain, as a function of y.
///
/// The minimizer is the unconstrained stationary curve of the x-objective
/// clamped into the y-dependent feasible band [lambda(y), mu(y)]; both are
/// piecewise linear, so the conditional is piecewise linear and the value is
/// piecewise quadratic on exactly the projection of the feasible set onto y
/// (intersected with y_box).
///
/// Throws Infeasible (step 0) when no y admits a feasible x, and NonConvex
/// (step 0) when the x-curvature is not positive on some segment while the
/// cross term is non-zero. Callers rethrow with their own step index.
Elimination eliminate_min(const BivariateQuadratic& q,
                          std::span<const lp2d::Halfplane2> rows,
                          const Interval& x_box, const PiecewiseQuadratic& prior,
                          const Interval& y_box = Interval::All());

}  // namespace qopp::pwq
