#include "qopp/lp2d.hpp"

#include <algorithm>
#include <cmath>

namespace qopp::lp2d {
namespace {

double row_scale(const Halfplane2& r, double x, double y) {
  return std::max(1.0, std::abs(r.alpha * x) + std::abs(r.beta * y) +
                           std::abs(r.gamma));
}

// Exact test: is {d : alpha_i * d <= gamma_i for all i} non-empty?
bool exact_1d_feasible(std::span<const Row1> rows) {
  double lo = -kInf;
  double hi = kInf;
  for (const Row1& r : rows) {
    if (r.alpha > 0.0) {
      hi = std::min(hi, r.gamma / r.alpha);
    } else if (r.alpha < 0.0) {
      lo = std::max(lo, r.gamma / r.alpha);
    } else if (r.gamma < 0.0) {
      return false;
    }
  }
  return lo <= hi;
}

void push_box(std::vector<Halfplane2>& rows, const Interval& box, bool is_x) {
  if (box.bounded_above()) {
    rows.push_back(is_x ? Halfplane2{1.0, 0.0, box.hi}
                        : Halfplane2{0.0, 1.0, box.hi});
  }
  if (box.bounded_below()) {
    rows.push_back(is_x ? Halfplane2{-1.0, 0.0, -box.lo}
                        : Halfplane2{0.0, -1.0, -box.lo});
  }
}

}  // namespace

bool satisfies(const Halfplane2& row, double x, double y) {
  return row.alpha * x + row.beta * y - row.gamma <=
         kFeasibilitySlack * row_scale(row, x, y);
}

Interval clamp_1d(std::span<const Row1> rows, const Interval& box) {
  if (box.empty()) return Interval::Empty();
  double lo = box.lo;
  double hi = box.hi;
  for (const Row1& r : rows) {
    if (r.alpha > 0.0) {
      hi = std::min(hi, r.gamma / r.alpha);
    } else if (r.alpha < 0.0) {
      lo = std::max(lo, r.gamma / r.alpha);
    } else if (r.gamma < -kFeasibilitySlack * std::max(1.0, std::abs(r.gamma))) {
      return Interval::Empty();
    }
  }
  if (lo <= hi) return {lo, hi};
  if (std::isfinite(lo) && std::isfinite(hi) &&
      lo - hi <= kFeasibilitySlack *
                     std::max({1.0, std::abs(lo), std::abs(hi)})) {
    const double mid = std::clamp(0.5 * (lo + hi), box.lo, box.hi);
    return {mid, mid};
  }
  return Interval::Empty();
}

Interval extremize_y(std::span<const Halfplane2> input, const Interval& x_box,
                     const Interval& y_box) {
  if (x_box.empty() || y_box.empty()) return Interval::Empty();

  std::vector<Halfplane2> rows;
  rows.reserve(input.size() + 4);
  for (const Halfplane2& r : input) {
    if (r.alpha == 0.0 && r.beta == 0.0) {
      if (r.gamma < -kFeasibilitySlack * std::max(1.0, std::abs(r.gamma))) {
        return Interval::Empty();
      }
      continue;
    }
    rows.push_back(r);
  }
  push_box(rows, x_box, true);
  push_box(rows, y_box, false);
  if (rows.empty()) return Interval::All();

  // Lineality space is non-trivial exactly when all normals are parallel.
  const Halfplane2& ref = rows.front();
  const bool collinear = std::all_of(rows.begin(), rows.end(), [&](const auto& r) {
    return r.alpha * ref.beta - r.beta * ref.alpha == 0.0;
  });
  if (collinear) {
    // Every row reads sigma_i * |n_i| * t <= gamma_i with t = n_ref . (x, y).
    const double ref_norm = std::hypot(ref.alpha, ref.beta);
    std::vector<Row1> projected;
    projected.reserve(rows.size());
    for (const Halfplane2& r : rows) {
      const double dot = r.alpha * ref.alpha + r.beta * ref.beta;
      projected.push_back({dot / ref_norm, r.gamma});
    }
    const Interval t = clamp_1d(projected, Interval::All());
    if (t.empty()) return Interval::Empty();
    if (ref.alpha != 0.0) return Interval::All();
    // Horizontal lines: t = sign(beta_ref) * y.
    return ref.beta > 0.0 ? t : Interval{-t.hi, -t.lo};
  }

  double best_lo = kInf;
  double best_hi = -kInf;
  bool any_vertex = false;
  const std::size_t m = rows.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const Halfplane2& ri = rows[i];
      const Halfplane2& rj = rows[j];
      const double det = ri.alpha * rj.beta - rj.alpha * ri.beta;
      if (det == 0.0) continue;
      const double x = (ri.gamma * rj.beta - rj.gamma * ri.beta) / det;
      const double y = (ri.alpha * rj.gamma - rj.alpha * ri.gamma) / det;
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      bool ok = true;
      for (std::size_t k = 0; k < m && ok; ++k) {
        if (k == i || k == j) continue;
        ok = satisfies(rows[k], x, y);
      }
      if (!ok) continue;
      any_vertex = true;
      best_lo = std::min(best_lo, y);
      best_hi = std::max(best_hi, y);
    }
  }
  if (!any_vertex) return Interval::Empty();

  // Recession directions (d_x, +-1) decide unboundedness in y.
  std::vector<Row1> up;
  std::vector<Row1> down;
  up.reserve(m);
  down.reserve(m);
  for (const Halfplane2& r : rows) {
    up.push_back({r.alpha, -r.beta});
    down.push_back({r.alpha, r.beta});
  }
  Interval out{best_lo, best_hi};
  if (exact_1d_feasible(up)) out.hi = kInf;
  if (exact_1d_feasible(down)) out.lo = -kInf;
  return out;
}

Interval extremize_x(std::span<const Halfplane2> rows, const Interval& x_box,
                     const Interval& y_box) {
  std::vector<Halfplane2> swapped;
  swapped.reserve(rows.size());
  for (const Halfplane2& r : rows) swapped.push_back({r.beta, r.alpha, r.gamma});
  return extremize_y(swapped, y_box, x_box);
}

}  // namespace qopp::lp2d
