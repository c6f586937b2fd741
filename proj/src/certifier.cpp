#include "rhlab/certifier.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "rhlab/dynamics.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/noise.hpp"

namespace rhlab {

namespace {

using boost::math::quadrature::gauss_kronrod;

double integrate(const std::function<double(double)>& g, double a, double b, double* err) {
  if (!(b > a)) return 0.0;
  double e = 0.0;
  double v = gauss_kronrod<double, 61>::integrate(g, a, b, 12, 1e-12, &e);
  *err += e;
  return v;
}

}  // namespace

ContractingIntegral contracting_log_integral_detail(const CircleMap& map) {
  ContractingIntegral out;
  out.components = level_components(map, 1.0, false);
  if (out.components.empty()) return out;
  auto log_abs = [&](double x) { return std::log(std::fabs(map.deriv(x))); };
  double total = 0.0;
  for (const Arc& comp : out.components) {
    const double u = comp.lo();
    const double v = comp.is_full() ? comp.lo() + 1.0 : comp.hi();
    std::vector<double> cuts = {u};
    for (double s : translates_in(map.nondiff_set(), u, v)) cuts.push_back(s);
    cuts.push_back(v);
    std::vector<double> crit = translates_in(map.critical_set(), u, v);
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      double a = cuts[piece];
      const double b = cuts[piece + 1];
      for (double c : crit) {
        if (c <= a || c >= b) continue;
        const double r = std::min({kCriticalModelRadius, 0.5 * (c - a), 0.5 * (b - c)});
        const double kappa = std::fabs(map.deriv2(c));
        CriticalFit fit{wrap01(c), kappa, 0.0, 0.0};
        if (kappa > 0.0) {
          fit.ratio_lo = std::fabs(map.deriv(c - r)) / (kappa * r);
          fit.ratio_hi = std::fabs(map.deriv(c + r)) / (kappa * r);
        }
        out.fits.push_back(fit);
        if (!(kappa > 1e-8 * std::max(1.0, map.sup_abs_deriv())) || fit.ratio_lo < 0.9 ||
            fit.ratio_lo > 1.1 || fit.ratio_hi < 0.9 || fit.ratio_hi > 1.1) {
          throw NonIntegrable("contracting_log_integral: degenerate critical point near " +
                              std::to_string(wrap01(c)));
        }
        total += integrate(log_abs, a, c - r, &out.error_estimate);
        // Closed-form local model plus the smooth remainder log|F'| - log(kappa |x - c|).
        total += 2.0 * r * (std::log(kappa * r) - 1.0);
        auto remainder = [&](double x) {
          if (std::fabs(x - c) < 1e-6 * r) return 0.0;
          return std::log(std::fabs(map.deriv(x))) - std::log(kappa * std::fabs(x - c));
        };
        total += integrate(remainder, c - r, c, &out.error_estimate);
        total += integrate(remainder, c, c + r, &out.error_estimate);
        a = c + r;
      }
      total += integrate(log_abs, a, b, &out.error_estimate);
    }
  }
  out.V = std::max(0.0, -total);
  return out;
}

double contracting_log_integral(const CircleMap& map) { return contracting_log_integral_detail(map).V; }

AdmissibleH admissible_h(double D_R, double V, double sigma, double R) {
  require(sigma > 0.0 && R > 1.0, "admissible_h: sigma > 0 and R > 1 required");
  AdmissibleH out;
  out.window = {D_R / (2.0 * sigma), 1.0 - V / (2.0 * sigma * std::log(R))};
  out.window.lo = std::max(out.window.lo, 0.0);
  out.window.hi = std::min(out.window.hi, 1.0);
  out.empty = !(out.window.hi > out.window.lo);
  out.midpoint = out.window.mid();
  return out;
}

AdmissibleH admissible_h(const PredominanceReport& report) {
  return admissible_h(report.D_R, report.V, report.sigma, report.R);
}

Arc delta_reference(const CircleMap& map, double R) {
  ExpandingRegion g = expanding_components(map, R);
  const Arc* best = &g.components.front();
  for (const Arc& a : g.components) {
    if (a.length() > best->length()) best = &a;
  }
  require(best->length() >= 1.0 / R, "delta_reference: no component of {|df| > R} has length >= 1/R");
  const double c = best->mid();
  Arc delta(c - 0.5 / R, c + 0.5 / R);
  const double image = std::fabs(map.lift(delta.hi()) - map.lift(delta.lo()));
  const double min_deriv = map.min_abs_deriv(delta.lo(), delta.hi());
  if (image < 1.0 || min_deriv < R * (1.0 - 1e-12)) {
    throw CoverFailed("delta_reference: image of Delta has length " + std::to_string(image) +
                      " and min |df| " + std::to_string(min_deriv));
  }
  return delta.normalized();
}

double accessibility_probability(const CircleMap& map, double sigma, double R, double gamma_margin,
                                 std::size_t trials, std::size_t grid, std::uint64_t seed) {
  require(trials >= 1 && grid >= 1, "accessibility_probability: trials, grid >= 1 required");
  require(gamma_margin >= 0.0, "accessibility_probability: gamma >= 0 required");
  const Arc delta = delta_reference(map, R);
  const std::vector<Arc> G = expanding_components(map, R).components;
  const std::vector<Arc> E = level_components(map, 1.0, true);
  auto depth_in = [](const std::vector<Arc>& comps, double x) {
    double best = -1.0;
    for (const Arc& a : comps) best = std::max(best, a.depth(x));
    return best;
  };
  if (gamma_margin >= 0.5 * delta.length()) return 0.0;
  NoiseStream noise(sigma, seed);
  double q = INFINITY;
  for (std::size_t gx = 0; gx < grid; ++gx) {
    const double x = (static_cast<double>(gx) + 0.5) / static_cast<double>(grid);
    NoiseStream w = noise.split(gx);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double z = x + w[t];
      if (depth_in(E, z) <= gamma_margin) continue;
      const double y = eval_map(map, x, w[t]).value();
      if (delta.contains(y) && depth_in(G, y) > gamma_margin) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    q = std::min(q, p - 3.0 * se);
  }
  return std::max(0.0, q);
}

PredominanceReport certify(const CircleMap& map, double sigma, double R, const CertifyOptions& options) {
  require(sigma > 0.0 && sigma < 0.5, "certify: sigma must lie in (0, 1/2)");
  require(R > 2.0, "certify: R > 2 required");
  PredominanceReport rep;
  rep.R = R;
  rep.sigma = sigma;
  try {
    ExpandingRegion g = expanding_components(map, R);
    rep.components = g.components;
    rep.D_R = g.D;
  } catch (const DegenerateRegion&) {
    rep.components.clear();
    rep.D_R = 1.0;
    rep.notes.push_back("super-expanding region {|df| > R} is empty");
  }

  rep.nondegenerate = true;
  try {
    rep.V = contracting_log_integral(map);
  } catch (const NonIntegrable& e) {
    rep.nondegenerate = false;
    rep.V = INFINITY;
    rep.notes.push_back(e.what());
  }

  rep.item1_min_component = INFINITY;
  for (const Arc& a : rep.components) rep.item1_min_component = std::min(rep.item1_min_component, a.length());
  if (rep.components.empty()) rep.item1_min_component = 0.0;
  const bool smooth = std::isfinite(map.sup_abs_deriv());
  rep.check_items[0] = smooth && rep.nondegenerate && !rep.components.empty() &&
                       rep.item1_min_component >= 1.0 / R;

  rep.item2_margin = -rep.V / std::log(R) + 2.0 / R + rep.D_R;
  rep.check_items[1] = std::isfinite(rep.V) && rep.item2_margin > 0.0;
  rep.item3_margin = sigma - 1.0 / R - rep.D_R;
  rep.check_items[2] = rep.item3_margin > 0.0;
  rep.pass = rep.check_items[0] && rep.check_items[1] && rep.check_items[2];

  if (std::isfinite(rep.V)) {
    AdmissibleH w = admissible_h(rep.D_R, rep.V, sigma, R);
    rep.h_window = w.window;
    rep.h_window_empty = w.empty;
    if (!w.empty) {
      rep.h = w.midpoint;
      rep.Z_h = std::log(R) * (1.0 - rep.h) - rep.V / (2.0 * sigma);
      if (rep.V > 0.0) {
        const double alpha_sup = 2.0 * sigma * std::log(R) * (1.0 - rep.h) / rep.V - 1.0;
        rep.alpha = 0.5 * alpha_sup;
      } else {
        rep.alpha = 1.0;
      }
      rep.Zbar_h = std::log(R) * (1.0 - rep.h) - (rep.alpha + 1.0) * rep.V / (2.0 * sigma);
    } else if (rep.check_items[1] && rep.check_items[2]) {
      rep.notes.push_back("inconsistency: items 2 and 3 hold but no admissible h exists");
    }
  }

  if (rep.check_items[0]) {
    try {
      rep.delta_arc = delta_reference(map, R);
      if (rep.pass && options.compute_access) {
        rep.q_access = accessibility_probability(map, sigma, R, options.gamma_margin,
                                                 options.access_trials, options.access_grid,
                                                 options.access_seed);
      }
    } catch (const CoverFailed& e) {
      rep.notes.push_back(e.what());
    }
  }
  return rep;
}

double c1_constant() {
  constexpr double pi = std::numbers::pi;
  return 4.0 * pi / std::sqrt(16.0 * pi * pi - 1.0);
}

SineCertification certify_sine_family(double L, double sigma, const CertifyOptions& options) {
  require(L >= 3.0, "certify_sine_family: L >= 3 required");
  constexpr double pi = std::numbers::pi;
  SineCertification out;
  out.L = L;
  out.sigma = sigma;
  out.R = std::max(3.0, std::sqrt(L));
  out.c1 = c1_constant();
  out.threshold = 1.0 / out.R + out.c1 * out.R / (pi * pi * L);
  out.closed_form_pass = sigma > out.threshold;
  out.report = certify(CircleMap::sine(L), sigma, out.R, options);
  out.quadrature_pass = out.report.pass;
  out.agree = out.closed_form_pass == out.quadrature_pass;
  out.within_band = std::fabs(sigma - out.threshold) < 1e-3;
  out.note = "R = max{3, sqrt(L)}; the alternative reading min{3, sqrt(L)} is not used";
  return out;
}

}  // namespace rhlab
