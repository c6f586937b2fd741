#include "rhlab/circle.hpp"

#include <algorithm>
#include <cstdio>

#include "rhlab/errors.hpp"

namespace rhlab {

Arc::Arc(double lift_lo, double lift_hi) : lo_(lift_lo), hi_(lift_hi) {
  require(std::isfinite(lift_lo) && std::isfinite(lift_hi), "Arc: endpoints must be finite");
  require(lift_hi > lift_lo, "Arc: lift_lo < lift_hi required");
  require(lift_hi - lift_lo <= 1.0 + 1e-15, "Arc: length must not exceed 1");
}

Arc Arc::normalized() const {
  double shift = std::floor(lo_);
  Arc a;
  a.lo_ = lo_ - shift;
  a.hi_ = hi_ - shift;
  return a;
}

bool Arc::contains(double x) const {
  if (is_full()) return true;
  double offset = wrap01(x - lo_);
  return offset <= length() || offset == 0.0;
}

double Arc::depth(double x) const {
  if (is_full()) return 0.5;
  double offset = wrap01(x - lo_);
  if (offset <= length()) return std::min(offset, length() - offset);
  return -std::min(offset - length(), 1.0 - offset);
}

bool Arc::contains_ball(double center, double radius) const {
  if (is_full()) return true;
  if (radius > 0.5 * length()) return false;
  return depth(center) >= radius;
}

bool Arc::contains_arc(const Arc& other) const {
  if (is_full()) return true;
  if (other.length() > length()) return false;
  double offset = wrap01(other.lo_ - lo_);
  return offset + other.length() <= length();
}

bool Arc::intersects(const Arc& other) const {
  if (is_full() || other.is_full()) return true;
  return contains(other.lo_) || other.contains(lo_);
}

std::string Arc::to_string() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", lo_, hi_);
  return buf;
}

}  // namespace rhlab
