#include "qopp/pwq.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>

#include "qopp/errors.hpp"

namespace qopp::pwq {

template <typename Segment>
Piecewise<Segment>::Piecewise(std::vector<double> breaks,
                              std::vector<Segment> segments)
    : breaks_(std::move(breaks)), segments_(std::move(segments)) {
  if (segments_.empty()) {
    breaks_.clear();
    return;
  }
  if (breaks_.size() != segments_.size() + 1) {
    throw InvalidProblem("piecewise: breakpoint count must be segments + 1");
  }
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i] <= breaks_[i + 1])) {
      throw InvalidProblem("piecewise: breakpoints must be non-decreasing");
    }
  }
}

template <typename Segment>
std::size_t Piecewise<Segment>::locate(double z) const {
  assert(!segments_.empty());
  // First interior break strictly greater than z.
  const auto first = breaks_.begin() + 1;
  const auto last = breaks_.end() - 1;
  const auto it = std::upper_bound(first, last, z);
  return static_cast<std::size_t>(it - first);
}

template class Piecewise<Quadratic>;
template class Piecewise<Linear>;

double evaluate(const PiecewiseQuadratic& f, double z) {
  if (!f.domain().contains(z)) return kInf;
  const Quadratic& q = f.segment(f.locate(z));
  if (std::isinf(z)) return (q.a == 0.0 && q.b == 0.0) ? q.c : kInf;
  return q(z);
}

double evaluate(const PiecewiseLinear& f, double z) {
  const double zc = f.domain().clamp(z);
  return f.segment(f.locate(zc))(zc);
}

bool BivariateQuadratic::is_psd(double rel_tol) const {
  const double scale = std::max({std::abs(p), std::abs(r), std::abs(n), 1e-300});
  const double tol = rel_tol * scale;
  return p >= -tol && r >= -tol && p * r - n * n >= -tol * scale;
}

namespace {

// Representative interior point of [lo, hi] for classifying linear pieces.
double sample_point(double lo, double hi) {
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  if (std::isfinite(lo)) return lo + std::max(1.0, std::abs(lo));
  if (std::isfinite(hi)) return hi - std::max(1.0, std::abs(hi));
  return 0.0;
}

template <typename Segment>
Piecewise<Segment> restrict_impl(const Piecewise<Segment>& f, const Interval& to) {
  const Interval dom = f.domain().intersect(to);
  if (dom.empty()) throw EmptyDomain("restrict: domains do not intersect");
  std::vector<double> breaks{dom.lo};
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Interval seg = f.segment_interval(i);
    if (seg.hi < dom.lo || seg.lo > dom.hi) continue;
    if (seg.hi == dom.lo && i + 1 < f.size()) continue;
    segs.push_back(f.segment(i));
    breaks.push_back(std::min(seg.hi, dom.hi));
    if (seg.hi >= dom.hi) break;
  }
  return {std::move(breaks), std::move(segs)};
}

bool coefficients_close(const Quadratic& x, const Quadratic& other) {
  const Quadratic y = other.recentered(x.z0);
  const double s = std::max({std::abs(x.a), std::abs(x.b), std::abs(x.c),
                             std::abs(y.a), std::abs(y.b), std::abs(y.c)});
  const double tol = 1e-10 * s;
  return std::abs(x.a - y.a) <= tol && std::abs(x.b - y.b) <= tol &&
         std::abs(x.c - y.c) <= tol;
}

bool coefficients_close(const Linear& x, const Linear& y) {
  const double s = std::max({std::abs(x.slope), std::abs(x.intercept),
                             std::abs(y.slope), std::abs(y.intercept)});
  const double tol = 1e-10 * s;
  return std::abs(x.slope - y.slope) <= tol &&
         std::abs(x.intercept - y.intercept) <= tol;
}

template <typename Segment>
Piecewise<Segment> prune_impl(const Piecewise<Segment>& f) {
  if (f.size() <= 1) return f;
  const Interval dom = f.domain();
  double scale = 1.0;
  if (dom.bounded() && dom.width() > 0.0) {
    scale = dom.width();
  } else {
    for (double b : f.breaks()) {
      if (std::isfinite(b)) scale = std::max(scale, std::abs(b));
    }
  }
  const double min_width = 1e-12 * scale;
  const auto& b = f.breaks();

  std::vector<double> breaks{b.front()};
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (b[i + 1] - b[i] < min_width) {
      if (!segs.empty()) breaks.back() = b[i + 1];
      continue;
    }
    segs.push_back(f.segment(i));
    breaks.push_back(b[i + 1]);
  }
  if (segs.empty()) {
    segs.push_back(f.segments().back());
    breaks.push_back(b.back());
  }

  std::vector<double> merged_breaks{breaks.front()};
  std::vector<Segment> merged;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!merged.empty() && coefficients_close(merged.back(), segs[i])) {
      merged_breaks.back() = breaks[i + 1];
      continue;
    }
    merged.push_back(segs[i]);
    merged_breaks.push_back(breaks[i + 1]);
  }
  return {std::move(merged_breaks), std::move(merged)};
}

template <typename Segment>
double continuity_impl(const Piecewise<Segment>& f) {
  double worst = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double t = f.breaks()[i];
    if (!std::isfinite(t)) continue;
    const double l = f.segment(i - 1)(t);
    const double r = f.segment(i)(t);
    worst = std::max(worst, std::abs(l - r) / std::max({1.0, std::abs(l), std::abs(r)}));
  }
  return worst;
}

}  // namespace

PiecewiseQuadratic restrict(const PiecewiseQuadratic& f, const Interval& to) {
  return restrict_impl(f, to);
}

PiecewiseQuadratic add(const PiecewiseQuadratic& f, const PiecewiseQuadratic& g) {
  if (f.empty() || g.empty()) throw EmptyDomain("add: empty operand");
  const Interval dom = f.domain().intersect(g.domain());
  if (dom.empty()) throw EmptyDomain("add: domains do not intersect");

  std::vector<double> cuts{dom.lo, dom.hi};
  for (double t : f.breaks()) {
    if (t > dom.lo && t < dom.hi) cuts.push_back(t);
  }
  for (double t : g.breaks()) {
    if (t > dom.lo && t < dom.hi) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.size() == 1) cuts.push_back(cuts.front());

  std::vector<Quadratic> segs;
  segs.reserve(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double m = sample_point(cuts[i], cuts[i + 1]);
    Quadratic s = f.segment(f.locate(m));
    s += g.segment(g.locate(m));
    segs.push_back(s);
  }
  return {std::move(cuts), std::move(segs)};
}

PiecewiseQuadratic add(const PiecewiseQuadratic& f, const Quadratic& q) {
  std::vector<Quadratic> segs = f.segments();
  for (Quadratic& s : segs) s += q;
  return {f.breaks(), std::move(segs)};
}

Minimum minimize(const PiecewiseQuadratic& f) {
  if (f.empty()) throw EmptyDomain("minimize: empty domain");
  std::optional<Minimum> best;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Quadratic& q = f.segment(i);
    const Interval seg = f.segment_interval(i);
    double z;
    if (q.a > 0.0) {
      z = seg.clamp(q.z0 - q.b / (2.0 * q.a));
    } else if (q.a == 0.0) {
      if (q.b > 0.0) {
        z = seg.lo;
      } else if (q.b < 0.0) {
        z = seg.hi;
      } else {
        z = seg.lo;
      }
    } else {
      if (!seg.bounded()) throw Unbounded("minimize: concave segment on unbounded interval");
      z = q(seg.lo) <= q(seg.hi) ? seg.lo : seg.hi;
    }
    double v;
    if (std::isinf(z)) {
      if (q.a != 0.0 || q.b != 0.0) throw Unbounded("minimize: objective unbounded below");
      v = q.c;
    } else {
      v = q(z);
    }
    if (!best || v < best->value) best = Minimum{z, v};
  }
  return *best;
}

PiecewiseQuadratic prune(const PiecewiseQuadratic& f) { return prune_impl(f); }
PiecewiseLinear prune(const PiecewiseLinear& f) { return prune_impl(f); }

bool is_convex(const PiecewiseQuadratic& f, double tol) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.segment(i).a < -1e-12) return false;
  }
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double t = f.breaks()[i];
    if (!std::isfinite(t)) continue;
    const double left = f.segment(i - 1).derivative(t);
    const double right = f.segment(i).derivative(t);
    if (left > right + tol * std::max({1.0, std::abs(left), std::abs(right)})) {
      return false;
    }
  }
  return true;
}

double continuity_defect(const PiecewiseQuadratic& f) { return continuity_impl(f); }
double continuity_defect(const PiecewiseLinear& f) { return continuity_impl(f); }

namespace {

// One piece of the unconstrained x-minimizer as a function of y, valid for
// w = -n*y up to w_hi.
struct StationaryPiece {
  double w_hi;
  Linear x_of_y;
};

class StationaryCurve {
 public:
  // Minimizer over the prior's domain of prior(x) + 0.5*p*x^2 + (g + n*y)*x.
  StationaryCurve(const BivariateQuadratic& q, const PiecewiseQuadratic& prior,
                  const Interval& xdom) {
    const PiecewiseQuadratic phi =
        restrict(add(prior, Quadratic{0.5 * q.p, q.g, 0.0}), xdom);
    for (const Quadratic& s : phi.segments()) {
      if (s.a < -1e-12 * std::max(1.0, std::abs(s.b))) {
        throw NonConvex(0, "x-objective has negative curvature");
      }
    }
    n_ = q.n;
    if (n_ == 0.0) {
      try {
        constant_ = minimize(phi).argmin;
      } catch (const Unbounded&) {
        // Decreasing without bound: the envelope in that direction decides.
        const Quadratic& last = phi.segments().back();
        constant_ = (!phi.domain().bounded_above() && last.a == 0.0 && last.b < 0.0)
                        ? kInf
                        : -kInf;
      }
      return;
    }
    for (const Quadratic& s : phi.segments()) {
      if (!(s.a > 0.0)) {
        throw NonConvex(0, "x-objective is flat on a segment with non-zero cross term");
      }
    }
    const auto& t = phi.breaks();
    const std::size_t m = phi.size();
    auto g_right = [&](std::size_t j) {  // derivative leaving t[j] to the right
      return phi.segment(j).derivative(t[j]);
    };
    auto g_left = [&](std::size_t j) {  // derivative arriving at t[j] from the left
      return phi.segment(j - 1).derivative(t[j]);
    };
    if (std::isfinite(t[0])) {
      pieces_.push_back({g_right(0), Linear{0.0, t[0]}});
    }
    for (std::size_t j = 0; j < m; ++j) {
      const Quadratic& s = phi.segment(j);
      const double upper = std::isfinite(t[j + 1]) ? g_left(j + 1) : kInf;
      pieces_.push_back({upper, Linear{-n_ / (2.0 * s.a), s.z0 - s.b / (2.0 * s.a)}});
      if (j + 1 < m && std::isfinite(t[j + 1])) {
        pieces_.push_back({g_right(j + 1), Linear{0.0, t[j + 1]}});
      }
    }
    if (std::isfinite(t[m])) {
      pieces_.push_back({kInf, Linear{0.0, t[m]}});
    }
  }

  Linear at(double y) const {
    if (n_ == 0.0) return Linear{0.0, constant_};
    const double w = -n_ * y;
    for (const StationaryPiece& p : pieces_) {
      if (w <= p.w_hi) return p.x_of_y;
    }
    return pieces_.back().x_of_y;
  }

  void knots(std::vector<double>& out) const {
    if (n_ == 0.0) return;
    for (const StationaryPiece& p : pieces_) {
      if (std::isfinite(p.w_hi)) out.push_back(-p.w_hi / n_);
    }
  }

 private:
  double n_ = 0.0;
  double constant_ = 0.0;
  std::vector<StationaryPiece> pieces_;
};

// max (lower) or min (upper) envelope of lines; nullopt means +-infinity.
std::optional<Linear> envelope(std::span<const Linear> lines, double y, bool upper) {
  std::optional<Linear> best;
  double best_v = 0.0;
  for (const Linear& l : lines) {
    const double v = l(y);
    if (!best || (upper ? v < best_v : v > best_v)) {
      best = l;
      best_v = v;
    }
  }
  return best;
}

void add_crossing(const Linear& a, const Linear& b, double lo, double hi,
                  std::vector<double>& out) {
  if (a.slope == b.slope) return;
  const double y = (b.intercept - a.intercept) / (a.slope - b.slope);
  if (y > lo && y < hi) out.push_back(y);
}

// Splits every interval of `cuts` (sorted) at the points generated by `fn`.
template <typename Fn>
std::vector<double> refine(const std::vector<double>& cuts, Fn&& fn) {
  std::vector<double> out = cuts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) fn(cuts[i], cuts[i + 1], out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() == 1) out.push_back(out.front());
  return out;
}

}  // namespace

Elimination eliminate_min(const BivariateQuadratic& q,
                          std::span<const lp2d::Halfplane2> rows,
                          const Interval& x_box, const PiecewiseQuadratic& prior,
                          const Interval& y_box) {
  if (prior.empty()) throw Infeasible(0, {}, "eliminate_min: empty prior domain");
  const Interval xdom = x_box.intersect(prior.domain());
  if (xdom.empty()) throw Infeasible(0, {}, "eliminate_min: empty x domain");
  const Interval ydom = lp2d::extremize_y(rows, xdom, y_box);
  if (ydom.empty()) throw Infeasible(0, {}, "eliminate_min: no y admits a feasible x");

  std::vector<Linear> lower;
  std::vector<Linear> upper;
  for (const lp2d::Halfplane2& r : rows) {
    if (r.alpha == 0.0) continue;  // pure y rows are already folded into ydom
    const Linear bound{-r.beta / r.alpha, r.gamma / r.alpha};
    (r.alpha > 0.0 ? upper : lower).push_back(bound);
  }
  if (xdom.bounded_below()) lower.push_back({0.0, xdom.lo});
  if (xdom.bounded_above()) upper.push_back({0.0, xdom.hi});

  const StationaryCurve stationary(q, prior, xdom);

  // Candidate breakpoints: envelope kinks and stationary-curve knots.
  std::vector<double> cuts;
  if (ydom.bounded_below()) cuts.push_back(ydom.lo);
  if (ydom.bounded_above()) cuts.push_back(ydom.hi);
  for (const auto* lines : {&lower, &upper}) {
    for (std::size_t i = 0; i < lines->size(); ++i) {
      for (std::size_t j = i + 1; j < lines->size(); ++j) {
        add_crossing((*lines)[i], (*lines)[j], ydom.lo, ydom.hi, cuts);
      }
    }
  }
  std::vector<double> knots;
  stationary.knots(knots);
  for (double y : knots) {
    if (y > ydom.lo && y < ydom.hi) cuts.push_back(y);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // Pad with the infinite ends so consecutive pairs enumerate every interval.
  if (!ydom.bounded_below()) cuts.insert(cuts.begin(), -kInf);
  if (!ydom.bounded_above()) cuts.push_back(kInf);
  if (cuts.size() == 1) cuts.push_back(cuts.front());

  // Clamp switches: where the stationary curve meets either envelope.
  cuts = refine(cuts, [&](double lo, double hi, std::vector<double>& out) {
    const double m = sample_point(lo, hi);
    const Linear s = stationary.at(m);
    if (auto l = envelope(lower, m, false)) add_crossing(s, *l, lo, hi, out);
    if (auto u = envelope(upper, m, true)) add_crossing(s, *u, lo, hi, out);
  });

  auto minimizer_line = [&](double m) -> Linear {
    const Linear s = stationary.at(m);
    const auto l = envelope(lower, m, false);
    const auto u = envelope(upper, m, true);
    const double sv = s(m);
    if (l && sv <= (*l)(m)) return *l;
    if (u && sv >= (*u)(m)) return *u;
    return s;
  };

  // Clamped pieces may cross prior breakpoints; split there too.
  cuts = refine(cuts, [&](double lo, double hi, std::vector<double>& out) {
    const Linear x = minimizer_line(sample_point(lo, hi));
    if (x.slope == 0.0) return;
    for (std::size_t j = 1; j < prior.size(); ++j) {
      const double y = (prior.breaks()[j] - x.intercept) / x.slope;
      if (y > lo && y < hi) out.push_back(y);
    }
  });

  std::vector<Linear> cond_segs;
  std::vector<Quadratic> value_segs;
  cond_segs.reserve(cuts.size());
  value_segs.reserve(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double m = sample_point(cuts[i], cuts[i + 1]);
    const Linear x = minimizer_line(m);
    if (!std::isfinite(x.slope) || !std::isfinite(x.intercept)) {
      throw Unbounded("eliminate_min: minimizer escapes to infinity");
    }
    // Expand about y = m: x = xm + s*(y - m).
    const double xm = x(m);
    const Quadratic& pj = prior.segment(prior.locate(xm));
    const double s = x.slope;
    cond_segs.push_back(x);
    value_segs.push_back(Quadratic{
        (pj.a + 0.5 * q.p) * s * s + q.n * s + 0.5 * q.r,
        (pj.derivative(xm) + q.p * xm + q.n * m + q.g) * s + q.r * m + q.n * xm + q.h,
        pj(xm) + q(xm, m),
        m,
    });
  }
  std::vector<double> cond_breaks = cuts;
  PiecewiseLinear conditional(std::move(cond_breaks), std::move(cond_segs));
  PiecewiseQuadratic value(std::move(cuts), std::move(value_segs));
  return {prune(conditional), prune(value)};
}

}  // namespace qopp::pwq
