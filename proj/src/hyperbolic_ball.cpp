#include <algorithm>
#include <cmath>

#include "rhlab/errors.hpp"
#include "rhlab/mp_real.hpp"
#include "rhlab/pliss.hpp"
#include "rhlab/roots.hpp"

namespace rhlab {

namespace {

struct Piece {
  double lo;
  double hi;
};

// Maximal monotone piece of the lift containing z (between consecutive singular translates).
Piece monotone_piece(const CircleMap& map, double z) {
  const auto& sc = map.singular_set();
  if (sc.empty()) return {z - 2.0, z + 2.0};
  if (distance_to_set(z, sc) < kCriticalTolerance) {
    throw NotFound("hyperbolic_ball_check: orbit passes through the singular set");
  }
  std::vector<double> near = translates_in(sc, z - 1.5, z + 1.5);
  Piece p{z - 1.5, z + 1.5};
  for (double s : near) {
    if (s <= z) p.lo = std::max(p.lo, s);
    if (s > z) p.hi = std::min(p.hi, s);
  }
  return p;
}

mp::Real min_abs_deriv_mp(const CircleMap& map, const mp::Real& lo, const mp::Real& hi) {
  mp::Real m = mp::abs(map.deriv(lo));
  mp::Real h = mp::abs(map.deriv(hi));
  if (h < m) m = h;
  for (double p : translates_in(map.inflection_set(), lo.to_double_down() - 1e-12,
                                hi.to_double_up() + 1e-12)) {
    mp::Real q(p);
    if (q > lo && q < hi) {
      mp::Real v = mp::abs(map.deriv(q));
      if (v < m) m = v;
    }
  }
  return m;
}

}  // namespace

BallCheckReport hyperbolic_ball_check(const CircleMap& map, const std::vector<double>& noise_prefix,
                                      double x, std::size_t n, double delta1, double kappa1,
                                      double image_tolerance) {
  require(n >= 1 && n <= noise_prefix.size(), "hyperbolic_ball_check: 1 <= n <= |noise| required");
  require(delta1 > 0.0 && delta1 < 0.25, "hyperbolic_ball_check: 0 < delta1 < 1/4 required");
  require(kappa1 > 1.0, "hyperbolic_ball_check: kappa1 > 1 required");
  require(map.supports_mp(), "hyperbolic_ball_check: map lacks multiprecision evaluation");

  BallCheckReport rep;
  const double log2_sup = std::max(1.0, std::log2(std::max(2.0, map.sup_abs_deriv())));
  rep.precision_bits = static_cast<int>(96 + std::ceil(static_cast<double>(n) * log2_sup) +
                                        std::ceil(std::log2(1.0 / delta1)));
  mp::PrecisionScope scope(rep.precision_bits);
  const mp::Real tol = mp::exp(mp::Real(-(rep.precision_bits - 16) * std::log(2.0)));

  // Forward orbit in lift coordinates, reduced after each step.
  std::vector<mp::Real> y(n + 1), z(n), k(n);
  std::vector<Piece> piece(n);
  y[0] = mp::Real(x);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = y[i] + mp::Real(noise_prefix[i]);
    piece[i] = monotone_piece(map, z[i].to_double());
    mp::Real fz = map.lift(z[i]);
    k[i] = mp::floor(fz);
    y[i + 1] = fz - k[i];
  }

  auto F = [&](const mp::Real& u) { return map.lift(u); };
  auto dF = [&](const mp::Real& u) { return map.deriv(u); };

  // Pull B(y_n, delta1) back through the monotone pieces.
  std::vector<mp::Real> lo(n + 1), hi(n + 1);
  lo[n] = y[n] - mp::Real(delta1);
  hi[n] = y[n] + mp::Real(delta1);
  for (std::size_t step = n; step-- > 0;) {
    mp::Real a(piece[step].lo), b(piece[step].hi);
    mp::Real fa = F(a), fb = F(b);
    mp::Real img_lo = fa < fb ? fa : fb;
    mp::Real img_hi = fa < fb ? fb : fa;
    mp::Real t_lo = lo[step + 1] + k[step];
    mp::Real t_hi = hi[step + 1] + k[step];
    if (t_lo < img_lo || t_hi > img_hi) {
      throw NotFound("hyperbolic_ball_check: no monotone branch reaches radius delta1 at step " +
                     std::to_string(step));
    }
    mp::Real u1 = invert_monotone(F, dF, t_lo, a, b, tol);
    mp::Real u2 = invert_monotone(F, dF, t_hi, a, b, tol);
    if (u2 < u1) std::swap(u1, u2);
    mp::Real w(noise_prefix[step]);
    lo[step] = u1 - w;
    hi[step] = u2 - w;
  }

  rep.J = {lo[0].to_double_down(), hi[0].to_double_up()};
  rep.J_lo_decimal = lo[0].to_string(rep.precision_bits * 3 / 10);
  rep.J_hi_decimal = hi[0].to_string(rep.precision_bits * 3 / 10);
  rep.J_length = (hi[0] - lo[0]).to_double_up();
  rep.J_length_bound = 2.0 * delta1 * std::pow(kappa1, -0.5 * static_cast<double>(n));
  rep.length_ok = rep.J_length <= rep.J_length_bound;

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mp::Real w(noise_prefix[i]);
    sum += mp::log(min_abs_deriv_mp(map, lo[i] + w, hi[i] + w)).to_double_down();
  }
  rep.min_log_deriv = sum;
  rep.log_deriv_bound = 0.5 * static_cast<double>(n) * std::log(kappa1);
  rep.derivative_ok = rep.min_log_deriv >= rep.log_deriv_bound;

  // Forward image of the endpoints through the same lift branches.
  mp::Real e1 = lo[0], e2 = hi[0];
  for (std::size_t i = 0; i < n; ++i) {
    mp::Real w(noise_prefix[i]);
    e1 = F(e1 + w) - k[i];
    e2 = F(e2 + w) - k[i];
  }
  if (e2 < e1) std::swap(e1, e2);
  mp::Real err1 = mp::abs(e1 - lo[n]);
  mp::Real err2 = mp::abs(e2 - hi[n]);
  rep.image_error = std::max(err1.to_double_up(), err2.to_double_up());
  rep.image_ok = rep.image_error <= image_tolerance;

  // g^i(J) inside B(g^i x, delta1 kappa1^{(i-n)/2}) for i = 0..n-1.
  double worst = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = delta1 * std::pow(kappa1, 0.5 * (static_cast<double>(i) - static_cast<double>(n)));
    mp::Real dev1 = y[i] - lo[i];
    mp::Real dev2 = hi[i] - y[i];
    mp::Real dev = dev1 < dev2 ? dev2 : dev1;
    double margin = (mp::Real(radius) - dev).to_double_down() / radius;
    worst = std::min(worst, margin);
  }
  rep.containment_margin = worst;
  rep.containment_ok = worst > 0.0;
  return rep;
}

}  // namespace rhlab
