#include "rhlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "rhlab/errors.hpp"
#include "rhlab/roots.hpp"

namespace rhlab {

CirclePoint eval_map(const CircleMap& map, CirclePoint x, double w) {
  return CirclePoint(map.lift(x.value() + w));
}

LogDerivative log_abs_derivative(const CircleMap& map, CirclePoint x, double w) {
  const double z = x.value() + w;
  if (distance_to_set(z, map.critical_set()) < kCriticalTolerance) {
    return {-INFINITY, DerivativeStatus::Critical};
  }
  const double d = std::fabs(map.deriv(z));
  if (d == 0.0) return {-INFINITY, DerivativeStatus::Critical};
  if (distance_to_set(z, map.nondiff_set()) < kCriticalTolerance) {
    return {std::log(d), DerivativeStatus::NonDifferentiable};
  }
  return {std::log(d), DerivativeStatus::Regular};
}

TruncatedDistance truncated_distance(const CircleMap& map, CirclePoint x, double w, double delta) {
  require(delta > 0.0 && delta < 0.5, "truncated_distance: delta must lie in (0, 1/2)");
  const double d = distance_to_set(x.value() + w, map.singular_set());
  if (d > delta) return {1.0, false};
  if (d < kDistanceFloor) return {kDistanceFloor, true};
  return {d, false};
}

std::vector<Arc> level_components(const CircleMap& map, double level, bool above) {
  constexpr int kScan = 1 << 14;
  auto g = [&](double x) { return std::fabs(map.deriv(x)) - level; };
  auto inside = [&](double v) { return above ? v > 0.0 : v < 0.0; };

  std::vector<char> in(kScan);
  for (int k = 0; k < kScan; ++k) in[k] = inside(g(static_cast<double>(k) / kScan)) ? 1 : 0;
  bool any_in = std::find(in.begin(), in.end(), 1) != in.end();
  bool any_out = std::find(in.begin(), in.end(), 0) != in.end();
  if (!any_in) return {};
  if (!any_out) return {Arc::full_circle()};

  // Boundary between an inside sample and an outside one, by bisection on membership.
  auto boundary = [&](double a, double b, bool a_in) {
    while (b - a > kRootTolerance) {
      double m = 0.5 * (a + b);
      if ((inside(g(m)) ? 1 : 0) == (a_in ? 1 : 0)) a = m; else b = m;
    }
    return 0.5 * (a + b);
  };

  // Start the walk at an outside sample so every component is entered and left.
  int start = static_cast<int>(std::find(in.begin(), in.end(), 0) - in.begin());
  std::vector<Arc> out;
  double entry = 0.0;
  for (int step = 1; step <= kScan; ++step) {
    int k_prev = start + step - 1;
    int k = start + step;
    bool prev_in = in[k_prev % kScan] != 0;
    bool cur_in = in[k % kScan] != 0;
    double a = static_cast<double>(k_prev) / kScan;
    double b = static_cast<double>(k) / kScan;
    if (!prev_in && cur_in) {
      entry = boundary(a, b, false);
    } else if (prev_in && !cur_in) {
      double exit = boundary(a, b, true);
      Arc arc(entry, exit);
      out.push_back(arc.normalized());
    }
  }
  std::sort(out.begin(), out.end(), [](const Arc& p, const Arc& q) { return p.lo() < q.lo(); });
  return out;
}

ExpandingRegion expanding_components(const CircleMap& map, double R) {
  require(R > 1.0, "expanding_components: R > 1 required");
  ExpandingRegion region;
  region.components = level_components(map, R, true);
  if (region.components.empty()) {
    throw DegenerateRegion("expanding_components: {|df| > R} is empty");
  }
  double total = 0.0;
  for (const Arc& a : region.components) total += a.length();
  region.D = 1.0 - total;
  return region;
}

RegularityReport regularity_check(const CircleMap& map, std::size_t grid_size) {
  require(grid_size >= 1000, "regularity_check: grid_size >= 1000 required");
  const Regularity reg = map.regularity();
  require(reg.B > 1.0 && reg.beta > 0.0, "regularity_check: B > 1 and beta > 0 required");
  RegularityReport rep;
  rep.B = reg.B;
  rep.beta = reg.beta;
  rep.lower_bound_margin = INFINITY;
  rep.holder_margin = INFINITY;
  const auto& sc = map.singular_set();
  auto dist_sc = [&](double x) { return sc.empty() ? 0.5 : distance_to_set(x, sc); };
  static constexpr double kOffsets[] = {-1.0, -0.5, -0.25, -0.1, -0.01, 0.01, 0.1, 0.25, 0.5, 1.0};

  for (std::size_t k = 0; k < grid_size; ++k) {
    const double x = (static_cast<double>(k) + 0.5) / static_cast<double>(grid_size);
    const double d = dist_sc(x);
    if (d < 1e-9) continue;
    const double lx = std::log(std::fabs(map.deriv(x)));
    const double margin1 = lx - (reg.beta * std::log(d) - std::log(reg.B));
    if (margin1 < rep.lower_bound_margin) {
      rep.lower_bound_margin = margin1;
      rep.lower_bound_witness = x;
    }
    for (double t : kOffsets) {
      const double y = x + t * 0.5 * d;
      if (dist_sc(y) < 1e-12) continue;
      const double ly = std::log(std::fabs(map.deriv(y)));
      const double bound = reg.B * circle_distance(x, y) / std::pow(d, reg.beta);
      const double margin2 = bound - std::fabs(lx - ly);
      if (margin2 < rep.holder_margin) {
        rep.holder_margin = margin2;
        rep.holder_witness_x = x;
        rep.holder_witness_y = wrap01(y);
      }
    }
  }
  rep.pass = rep.lower_bound_margin >= 0.0 && rep.holder_margin >= 0.0;
  return rep;
}

}  // namespace rhlab
