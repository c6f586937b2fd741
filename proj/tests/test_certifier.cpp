#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rhlab/certifier.hpp"
#include "rhlab/dynamics.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/mp_real.hpp"

using namespace rhlab;
constexpr double kPi = std::numbers::pi;

namespace {

// Midpoint rule with the critical neighbourhoods excised and replaced by the
// closed-form local integral 2 e (log(kappa e) - 1).
double midpoint_V(double L, int N) {
  const double eps = 1e-6;
  const double kappa = 4.0 * kPi * kPi * L;
  long double sum = 0.0L;
  const double h = 1.0 / N;
  for (int k = 0; k < N; ++k) {
    double x = (k + 0.5) * h;
    if (std::fabs(x - 0.25) < eps || std::fabs(x - 0.75) < eps) continue;
    double d = std::fabs(2.0 * kPi * L * std::cos(2.0 * kPi * x));
    if (d < 1.0) sum += std::log(d) * h;
  }
  double local = 2.0 * eps * (std::log(kappa * eps) - 1.0);
  return -(static_cast<double>(sum) + 2.0 * local);
}

}  // namespace

TEST_CASE("contracting integral vanishes for uniformly expanding maps") {
  CHECK(contracting_log_integral(CircleMap::linear(3)) == 0.0);
  CHECK(contracting_log_integral(CircleMap::linear(-2)) == 0.0);
}

TEST_CASE("contracting integral for L=3 matches a midpoint-rule oracle") {
  const double V = contracting_log_integral(CircleMap::sine(3.0));
  const double oracle = midpoint_V(3.0, 10000000);
  CHECK(V > 0.0);
  CHECK(V == doctest::Approx(oracle).epsilon(2e-6));
}

TEST_CASE("contracting integral is independent of the singular model radius") {
  const double V0 = contracting_log_integral(CircleMap::sine(5.0));
  const double V1 = contracting_log_integral(CircleMap::sine(5.0, 0.3));
  CHECK(V0 == doctest::Approx(V1).epsilon(1e-10));
  // Closed form of the contracting integral for a sine: with u = 2 pi L cos,
  // V = (2 / pi) * int_0^{a} -log(2 pi L sin t) dt, a = asin(1/(2 pi L)).
  const double L = 5.0;
  const double a = std::asin(1.0 / (2.0 * kPi * L));
  const int M = 20000;
  double s = 0.0;
  for (int i = 0; i <= M; ++i) {
    double t = a * i / M;
    double g = t == 0.0 ? 0.0 : std::log(std::sin(t) / t);
    double wgt = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += wgt * g;
  }
  s *= a / (3.0 * M);
  const double integral = std::log(2.0 * kPi * L) * a + (a * std::log(a) - a) + s;
  CHECK(V0 == doctest::Approx(-2.0 / kPi * integral).epsilon(1e-9));
}

TEST_CASE("V bound and D bound for L=9") {
  const double c1 = c1_constant();
  const double V = contracting_log_integral(CircleMap::sine(9.0));
  CHECK(V >= 0.0);
  CHECK(V <= c1 / (kPi * kPi * 9.0));
}

TEST_CASE("V >= 0 and V = 0 iff C is empty") {
  for (double L : {0.1, 0.15, 3.0, 9.0}) {
    ContractingIntegral ci = contracting_log_integral_detail(CircleMap::sine(L));
    CHECK(ci.V >= 0.0);
    CHECK((ci.V > 0.0) == !ci.components.empty());
  }
}

TEST_CASE("degenerate critical points are rejected") {
  // F(x) = x + (1/(2 pi)) (1 - cos(2 pi x)) ... has F' = 1 + sin, with a double zero at 3/4.
  CircleMap cubic = CircleMap::from_functions(
      [](double x) { return x - std::cos(2.0 * kPi * x) / (2.0 * kPi); },
      [](double x) { return 1.0 + std::sin(2.0 * kPi * x); },
      [](double x) { return 2.0 * kPi * std::cos(2.0 * kPi * x); }, 1);
  CHECK_THROWS_AS(contracting_log_integral(cubic), NonIntegrable);
}

TEST_CASE("certify L=9, R=3, sigma=0.4 passes") {
  PredominanceReport r = certify(CircleMap::sine(9.0), 0.4, 3.0);
  CHECK(r.check_items[0]);
  CHECK(r.check_items[1]);
  CHECK(r.check_items[2]);
  CHECK(r.pass);
  CHECK_FALSE(r.h_window_empty);
  CHECK(r.h_window.lo == doctest::Approx(r.D_R / 0.8));
  CHECK(r.h_window.hi == doctest::Approx(1.0 - r.V / (0.8 * std::log(3.0))));
  CHECK(r.Z_h > 0.0);
  CHECK(r.Zbar_h > 0.0);
  CHECK(r.alpha > 0.0);
  CHECK(r.q_access > 0.0);
  REQUIRE(r.delta_arc.has_value());
  CHECK(r.delta_arc->length() == doctest::Approx(1.0 / 3.0));
  const double threshold = 1.0 / 3.0 + c1_constant() * 3.0 / (9.0 * kPi * kPi);
  CHECK(threshold < 0.4);
}

TEST_CASE("certify fails item 3 with tiny noise") {
  PredominanceReport r = certify(CircleMap::sine(9.0), 0.01, 3.0);
  CHECK_FALSE(r.check_items[2]);
  CHECK_FALSE(r.pass);
  CHECK(r.item3_margin < 0.0);
}

TEST_CASE("certify L=3, R=3, sigma=0.45 records margins") {
  PredominanceReport r = certify(CircleMap::sine(3.0), 0.45, 3.0);
  CHECK(r.pass == (r.item2_margin > 0.0 && r.check_items[0] && r.check_items[2]));
  CHECK(std::isfinite(r.item2_margin));
}

TEST_CASE("certify preconditions") {
  CHECK_THROWS_AS(certify(CircleMap::sine(9.0), 0.6, 3.0), PreconditionError);
  CHECK_THROWS_AS(certify(CircleMap::sine(9.0), 0.4, 1.5), PreconditionError);
}

TEST_CASE("admissible_h") {
  AdmissibleH w = admissible_h(0.0, 0.0, 0.4, 3.0);
  CHECK(w.window.lo == 0.0);
  CHECK(w.window.hi == 1.0);
  CHECK_FALSE(w.empty);
  for (double L : {3.0, 5.0, 9.0, 25.0, 100.0}) {
    const CircleMap f = CircleMap::sine(L);
    const double R = std::max(3.0, std::sqrt(L));
    const double D = expanding_components(f, R).D;
    const double V = contracting_log_integral(f);
    for (double bump : {1e-9, 1e-6, 1e-3, 1e-2}) {
      const double sigma = 1.0 / R + D + bump;
      if (sigma >= 0.5) continue;
      AdmissibleH a = admissible_h(D, V, sigma, R);
      CHECK_FALSE(a.empty);
      double Z = std::log(R) * (1.0 - a.midpoint) - V / (2.0 * sigma);
      CHECK(Z > 0.0);
    }
  }
}

TEST_CASE("delta reference") {
  Arc d = delta_reference(CircleMap::sine(3.0), 3.0);
  double c = wrap01(d.mid());
  CHECK(std::min({std::fabs(c), std::fabs(c - 0.5), std::fabs(c - 1.0)}) < 1e-9);
  const CircleMap f = CircleMap::sine(3.0);
  CHECK(std::fabs(f.lift(d.hi()) - f.lift(d.lo())) >= 1.0);
  Arc d9 = delta_reference(CircleMap::sine(9.0), 3.0);
  CHECK(d9.length() == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(delta_reference(CircleMap::sine(3.0), 6.0 * kPi + 1.0), DegenerateRegion);
}

TEST_CASE("accessibility probability") {
  const CircleMap f = CircleMap::sine(5.0);
  double q = accessibility_probability(f, 0.45, 3.0, 0.01, 10000, 256);
  CHECK(q > 0.0);
  CHECK(accessibility_probability(f, 0.45, 3.0, 0.2, 1000, 16) == 0.0);
}

TEST_CASE("accessibility with sigma = 1/2 is x-independent") {
  // x + w is uniform, so each grid point estimates the same probability; compare
  // against a deterministic Riemann-sum oracle over the circle.
  const CircleMap f = CircleMap::sine(5.0);
  const double gamma = 0.01;
  const Arc delta = delta_reference(f, 3.0);
  const auto G = expanding_components(f, 3.0).components;
  const auto E = level_components(f, 1.0, true);
  auto depth_in = [](const std::vector<Arc>& comps, double x) {
    double best = -1.0;
    for (const Arc& a : comps) best = std::max(best, a.depth(x));
    return best;
  };
  const int N = 200000;
  int hits = 0;
  for (int k = 0; k < N; ++k) {
    double z = (k + 0.5) / N;
    if (depth_in(E, z) <= gamma) continue;
    double y = wrap01(f.lift(z));
    if (delta.contains(y) && depth_in(G, y) > gamma) ++hits;
  }
  const double p = static_cast<double>(hits) / N;
  const double q = accessibility_probability(f, 0.5, 3.0, gamma, 20000, 8);
  const double se = std::sqrt(p * (1.0 - p) / 20000);
  CHECK(q <= p);
  CHECK(q >= p - 6.0 * se - 4.0 * se);
}

TEST_CASE("sine family certification") {
  SineCertification a = certify_sine_family(9.0, 0.4);
  CHECK(a.R == 3.0);
  CHECK(a.threshold == doctest::Approx(1.0 / 3.0 + c1_constant() * 3.0 / (9.0 * kPi * kPi)).epsilon(1e-15));
  CHECK(a.closed_form_pass);
  CHECK(a.agree);
  SineCertification b = certify_sine_family(3.0, 0.1);
  CHECK_FALSE(b.closed_form_pass);
  CHECK_FALSE(b.quadrature_pass);
  SineCertification c = certify_sine_family(100.0, 0.2);
  CHECK(c.R == 10.0);
  CHECK(c.threshold == doctest::Approx(0.1 + c1_constant() * 10.0 / (100.0 * kPi * kPi)));
  CHECK(c.agree);
  CHECK_THROWS_AS(certify_sine_family(2.0, 0.4), PreconditionError);
}

TEST_CASE("c1 against an extended-precision evaluation") {
  rhlab::mp::PrecisionScope scope(256);
  using rhlab::mp::Real;
  Real pi = Real::pi();
  Real c1 = Real(4.0) * pi / rhlab::mp::sqrt(Real(16.0) * pi * pi - Real(1.0));
  CHECK(std::fabs(c1_constant() - c1.to_double()) < 1e-15);
  CHECK(c1_constant() == doctest::Approx(1.00318).epsilon(1e-5));
}
