#pragma once

#include <cmath>
#include <span>
#include <string>

namespace rhlab {

// Reduce a real to [0, 1).
inline double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

// Arc-length distance on the unit circle.
inline double circle_distance(double a, double b) {
  double d = std::fabs(wrap01(a) - wrap01(b));
  return d > 0.5 ? 1.0 - d : d;
}

// Distance from x to a finite set of circle points; +inf for an empty set.
inline double distance_to_set(double x, std::span<const double> set) {
  double best = INFINITY;
  for (double s : set) best = std::fmin(best, circle_distance(x, s));
  return best;
}

class CirclePoint {
 public:
  CirclePoint() = default;
  CirclePoint(double x) : x_(wrap01(x)) {}  // NOLINT(google-explicit-constructor)
  double value() const { return x_; }
  operator double() const { return x_; }  // NOLINT(google-explicit-constructor)

 private:
  double x_ = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool empty() const { return !(hi > lo); }
};

class Arc {
 public:
  Arc() = default;
  Arc(double lift_lo, double lift_hi);

  static Arc full_circle() { return Arc(0.0, 1.0); }
  // Arc with lo reduced into [0, 1), keeping the length.
  Arc normalized() const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double length() const { return hi_ - lo_; }
  double mid() const { return 0.5 * (lo_ + hi_); }
  bool is_full() const { return length() >= 1.0; }

  // Closed-arc membership mod 1.
  bool contains(double x) const;
  // Ball B(center, radius) contained in this arc, mod 1.
  bool contains_ball(double center, double radius) const;
  bool contains_arc(const Arc& other) const;
  bool intersects(const Arc& other) const;
  // Signed distance from x to the complement of the arc (positive inside).
  double depth(double x) const;

  std::string to_string() const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
};

}  // namespace rhlab
