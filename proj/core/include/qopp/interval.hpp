#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace qopp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval over the extended reals. The empty interval is a
/// distinguished value (lo > hi), never produced by ordinary arithmetic.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  static constexpr Interval Empty() { return {kInf, -kInf}; }
  static constexpr Interval Point(double v) { return {v, v}; }
  static constexpr Interval All() { return {-kInf, kInf}; }
  static constexpr Interval AtLeast(double v) { return {v, kInf}; }
  static constexpr Interval AtMost(double v) { return {-kInf, v}; }

  bool empty() const { return !(lo <= hi); }
  bool bounded_below() const { return lo > -kInf; }
  bool bounded_above() const { return hi < kInf; }
  bool bounded() const { return bounded_below() && bounded_above(); }
  double width() const { return empty() ? 0.0 : hi - lo; }

  bool contains(double v, double slack = 0.0) const {
    return !empty() && v >= lo - slack && v <= hi + slack;
  }

  Interval intersect(const Interval& o) const {
    if (empty() || o.empty()) return Empty();
    Interval r{std::max(lo, o.lo), std::min(hi, o.hi)};
    return r.empty() ? Empty() : r;
  }

  double clamp(double v) const { return std::min(std::max(v, lo), hi); }

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.empty() && b.empty()) return true;
    return a.lo == b.lo && a.hi == b.hi;
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& i) {
    if (i.empty()) return os << "[empty]";
    return os << '[' << i.lo << ", " << i.hi << ']';
  }
};

}  // namespace qopp
