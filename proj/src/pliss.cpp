#include "rhlab/pliss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rhlab/errors.hpp"
#include "rhlab/mp_real.hpp"

namespace rhlab {

PlissSelection pliss_select(const std::vector<double>& a, double c, double A) {
  require(c > 0.0 && c <= A, "pliss_select: 0 < c <= A required");
  PlissSelection sel;
  sel.c = c;
  sel.A = A;
  sel.gamma = c / A;
  const std::size_t N = a.size();
  double total = 0.0;
  // m = minimum over k of sum_{j=k}^{n} a_j, updated as a_n + min(0, m_{n-1}).
  double m = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double v = a[n - 1];
    if (v > A) sel.hypothesis_violated = true;
    total += v;
    m = v + std::min(0.0, m);
    if (m >= 0.0) sel.indices.push_back(n);
  }
  sel.sum_condition = N > 0 && total >= c * static_cast<double>(N);
  if (sel.sum_condition) {
    sel.guaranteed = static_cast<std::size_t>(std::ceil(sel.gamma * static_cast<double>(N) - 1e-12));
  }
  return sel;
}

double default_b(double beta) {
  require(beta > 0.0, "default_b: beta > 0 required");
  return std::min(0.5, 1.0 / (2.0 * beta)) * (1.0 - 1e-6);
}

HyperbolicTimeRecord hyperbolic_times(const Orbit& orbit, double kappa1, double delta, double b) {
  require(kappa1 > 1.0, "hyperbolic_times: kappa1 > 1 required");
  require(b > 0.0 && b < 0.5, "hyperbolic_times: 0 < b < 1/2 required");
  const std::size_t k = orbit.delta_index(delta);
  const std::vector<double>& d = orbit.dist[k];
  const double L = std::log(kappa1);
  HyperbolicTimeRecord rec{{}, kappa1, delta, b};
  double max_u = -INFINITY;  // max_{i<n} (S_i - i L)
  double max_w = -INFINITY;  // max_{j<n} (-log d_j + b L j)
  for (std::size_t n = 1; n <= orbit.length(); ++n) {
    max_u = std::max(max_u, orbit.S[n - 1] - static_cast<double>(n - 1) * L);
    max_w = std::max(max_w, -std::log(d[n - 1]) + b * L * static_cast<double>(n - 1));
    const double u = orbit.S[n] - static_cast<double>(n) * L;
    if (u >= max_u && max_w <= b * L * static_cast<double>(n)) rec.times.push_back(n);
  }
  return rec;
}

double delta_for_H(double target) {
  require(target > 0.0, "delta_for_H: positive target required");
  const double e_inv = std::exp(-1.0);
  if (H_of_delta(e_inv * (1.0 - 1e-12)) <= target) return e_inv * (1.0 - 1e-12);
  double lo = -745.0;  // log delta
  double hi = -1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (H_of_delta(std::exp(mid)) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(lo);
}

FrequencyBound make_frequency_bound(double lambda, double A, double b, std::optional<double> delta) {
  require(lambda > 0.0 && A > 0.0 && lambda <= 2.0 * A, "frequency bound: 0 < lambda <= 2A required");
  require(b > 0.0 && b < 0.5, "frequency bound: 0 < b < 1/2 required");
  FrequencyBound fb;
  fb.lambda = lambda;
  fb.A = A;
  fb.b = b;
  fb.gamma1 = lambda / (2.0 * A);
  fb.delta = delta ? *delta : delta_for_H(0.5 * fb.gamma1 * b * lambda / 8.0);
  require(fb.delta > 0.0 && fb.delta < 0.5, "frequency bound: delta must lie in (0, 1/2)");
  fb.H_delta = H_of_delta(fb.delta);
  fb.gamma2_printed = 1.0 - 8.0 * fb.H_delta / lambda;
  fb.gamma2_consistent = 1.0 - 8.0 * fb.H_delta / (b * lambda);
  fb.gamma2 = std::min(fb.gamma2_printed, fb.gamma2_consistent);
  fb.gamma = fb.gamma1 + fb.gamma2 - 1.0;
  fb.kappa1 = std::exp(lambda / 8.0);
  fb.smallness_holds = fb.H_delta < fb.gamma1 * b * lambda / 8.0;
  return fb;
}

FrequencyReport frequency_check(const Orbit& orbit, const FrequencyBound& fb, std::size_t N) {
  require(N >= 1 && N <= orbit.length(), "frequency_check: 1 <= N <= orbit length required");
  FrequencyReport rep;
  rep.N = N;
  const std::size_t k = orbit.delta_index(fb.delta);
  rep.S_N = orbit.S[N];
  rep.Z_N = orbit.Z[k][N];
  rep.required = fb.gamma * static_cast<double>(N);
  rep.hypotheses_met = rep.S_N > fb.lambda * static_cast<double>(N) &&
                       rep.Z_N < fb.H_delta * static_cast<double>(N);
  HyperbolicTimeRecord rec = hyperbolic_times(orbit, fb.kappa1, fb.delta, fb.b);
  rep.count = static_cast<std::size_t>(
      std::count_if(rec.times.begin(), rec.times.end(), [N](std::size_t t) { return t <= N; }));
  if (!rep.hypotheses_met) {
    rep.outcome = "no claim";
    return rep;
  }
  rep.violation = static_cast<double>(rep.count) < rep.required;
  rep.outcome = rep.violation ? "violated" : "holds";
  return rep;
}

std::vector<std::size_t> interval_hyperbolic_times(const Orbit& orbit, const Arc& I, double delta1,
                                                   double kappa1, double delta, double b) {
  require(I.contains(orbit.x0), "interval_hyperbolic_times: x0 must lie in I");
  require(delta1 > 0.0, "interval_hyperbolic_times: delta1 > 0 required");
  std::vector<std::size_t> out;
  for (std::size_t n : hyperbolic_times(orbit, kappa1, delta, b).times) {
    double radius = delta1 * std::pow(kappa1, -0.5 * static_cast<double>(n));
    if (I.contains_ball(orbit.x0, radius)) out.push_back(n);
  }
  return out;
}

Orbit iterate_orbit_mp(const CircleMap& map, const NoiseStream& noise, double x0, std::size_t n,
                       const std::vector<double>& deltas, long bits) {
  require(n >= 1, "iterate_orbit_mp: n >= 1 required");
  require(map.supports_mp(), "iterate_orbit_mp: map lacks multiprecision evaluation");
  for (double d : deltas) require(d > 0.0 && d < 0.5, "orbit: delta must lie in (0, 1/2)");
  mp::PrecisionScope scope(bits);
  Orbit o;
  o.x0 = CirclePoint(x0).value();
  o.deltas = deltas;
  o.dist.assign(deltas.size(), {});
  o.Z.assign(deltas.size(), {0.0});
  o.points.push_back(o.x0);
  o.S.push_back(0.0);
  CompensatedSum S;
  std::vector<CompensatedSum> Z(deltas.size());
  mp::Real y(o.x0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = noise[i];
    mp::Real z = y + mp::Real(w);
    mp::Real z_red = z - mp::floor(z);
    const double zd = z_red.to_double();
    const double dist_c = distance_to_set(zd, map.critical_set());
    double ld;
    if (dist_c < kCriticalTolerance) {
      ld = -INFINITY;
      if (!o.singular_step) o.singular_step = i;
    } else {
      ld = mp::log(mp::abs(map.deriv(z))).to_double();
    }
    const double dist_sc = distance_to_set(zd, map.singular_set());
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      double dv = dist_sc > deltas[k] ? 1.0 : std::max(dist_sc, kDistanceFloor);
      if (dist_sc < kDistanceFloor) ++o.clamp_count;
      o.dist[k].push_back(dv);
      Z[k].add(-std::log(dv));
      o.Z[k].push_back(Z[k].value());
    }
    S.add(ld);
    mp::Real fy = map.lift(z);
    y = fy - mp::floor(fy);
    o.noise.push_back(w);
    o.log_deriv.push_back(ld);
    o.S.push_back(S.value());
    o.points.push_back(wrap01(y.to_double()));
  }
  return o;
}

}  // namespace rhlab
