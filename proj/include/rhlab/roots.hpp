#pragma once

#include <cmath>
#include <functional>

#include "rhlab/errors.hpp"

namespace rhlab {

// Bisection for a sign change of g on [a, b]; returns a point within tol of a root.
template <class G>
double bisect_root(const G& g, double a, double b, double tol) {
  double ga = g(a);
  double gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  require((ga > 0.0) != (gb > 0.0), "bisect_root: no sign change on bracket");
  while (b - a > tol) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm > 0.0) == (ga > 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Solve F(x) = y for x in [a, b] where F is strictly monotone on [a, b].
// Newton steps are accepted only while they stay inside the shrinking bracket.
template <class T, class F, class DF>
T invert_monotone(const F& f, const DF& df, const T& y, T a, T b, const T& tol, int max_iter = 400) {
  T fa = f(a) - y;
  T fb = f(b) - y;
  const T zero(0.0);
  if (fa == zero) return a;
  if (fb == zero) return b;
  const bool increasing = fb > fa;
  // Clamp targets that fall outside the bracket's image by rounding.
  if (increasing ? (fa > zero) : (fa < zero)) return a;
  if (increasing ? (fb < zero) : (fb > zero)) return b;
  T x = (a + b) * T(0.5);
  for (int it = 0; it < max_iter; ++it) {
    T fx = f(x) - y;
    if (fx == zero) return x;
    if ((fx > zero) == increasing) {
      b = x;
    } else {
      a = x;
    }
    if (b - a <= tol) return (a + b) * T(0.5);
    T d = df(x);
    T next = (a + b) * T(0.5);
    if (!(d == zero)) {
      T newton = x - fx / d;
      if (newton > a && newton < b) next = newton;
    }
    T step = next - x;
    if (step < zero) step = zero - step;
    x = next;
    if (step <= tol) return x;
  }
  return x;
}

}  // namespace rhlab
