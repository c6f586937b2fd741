#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "rhlab/errors.hpp"
#include "rhlab/pliss.hpp"

using namespace rhlab;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<std::size_t> brute_pliss(const std::vector<double>& a) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= a.size(); ++n) {
    bool ok = true;
    for (std::size_t k = 1; k <= n && ok; ++k) {
      double s = 0.0;
      for (std::size_t j = k; j <= n; ++j) s += a[j - 1];
      ok = s >= 0.0;
    }
    if (ok) out.push_back(n);
  }
  return out;
}

// Literal reading: for all 0 < m <= n, S_n - S_{n-m} >= m log k and d_{n-m} >= k^{-bm}.
std::vector<std::size_t> brute_hyperbolic(const Orbit& o, double kappa1, double delta, double b) {
  const auto& d = o.dist[o.delta_index(delta)];
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= o.length(); ++n) {
    bool ok = true;
    for (std::size_t m = 1; m <= n && ok; ++m) {
      ok = o.S[n] - o.S[n - m] >= static_cast<double>(m) * std::log(kappa1) &&
           d[n - m] >= std::pow(kappa1, -b * static_cast<double>(m));
    }
    if (ok) out.push_back(n);
  }
  return out;
}

Orbit synthetic_orbit(const std::vector<double>& log_deriv, const std::vector<double>& dist, double delta) {
  Orbit o;
  o.x0 = 0.5;
  o.deltas = {delta};
  o.dist = {dist};
  o.Z = {{0.0}};
  o.S = {0.0};
  for (std::size_t i = 0; i < log_deriv.size(); ++i) {
    o.noise.push_back(0.0);
    o.points.push_back(0.5);
    o.log_deriv.push_back(log_deriv[i]);
    o.S.push_back(o.S.back() + log_deriv[i]);
    o.Z[0].push_back(o.Z[0].back() - std::log(dist[i]));
  }
  o.points.push_back(0.5);
  return o;
}

}  // namespace

TEST_CASE("pliss_select examples") {
  PlissSelection a = pliss_select({1, 1, 1, 1}, 1.0, 1.0);
  CHECK(a.indices == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(a.gamma == 1.0);
  PlissSelection b = pliss_select({2, -1, 2, -1}, 0.5, 2.0);
  CHECK(b.indices == brute_pliss({2, -1, 2, -1}));
  CHECK(b.indices.size() >= 1);
  CHECK(b.sum_condition);
  CHECK(b.indices.size() >= b.guaranteed);
  PlissSelection c = pliss_select({-1, -1}, 0.5, 1.0);
  CHECK(c.indices.empty());
  CHECK_FALSE(c.sum_condition);
  PlissSelection d = pliss_select({3, -1}, 0.5, 2.0);
  CHECK(d.hypothesis_violated);
  CHECK_THROWS_AS(pliss_select({1}, 2.0, 1.0), PreconditionError);
}

TEST_CASE("pliss_select agrees with brute force on random sequences") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> len(1, 32);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> grid(-8, 8);
  for (int trial = 0; trial < 3000; ++trial) {
    const double A = 2.0;
    std::vector<double> a(static_cast<std::size_t>(len(rng)));
    for (double& v : a) v = trial % 2 ? A * unit(rng) : A * grid(rng) / 8.0;
    const double c = 0.25;
    PlissSelection sel = pliss_select(a, c, A);
    REQUIRE(sel.indices == brute_pliss(a));
    if (sel.sum_condition) CHECK(sel.indices.size() >= sel.guaranteed);
  }
}

TEST_CASE("hyperbolic times on the zero-noise fixed point") {
  Orbit o = iterate_orbit(CircleMap::sine(3.0), NoiseStream(0.0, 1), 0.0, 50, {0.1});
  HyperbolicTimeRecord rec = hyperbolic_times(o, 2.0, 0.1, 0.49);
  CHECK(rec.times.size() == 50);
  FrequencyBound fb = make_frequency_bound(2.0, std::log(6.0 * kPi), 0.49, 0.1);
  Orbit o2 = iterate_orbit(CircleMap::sine(3.0), NoiseStream(0.0, 1), 0.0, 50, {fb.delta});
  FrequencyReport fr = frequency_check(o2, fb, 50);
  CHECK(fr.hypotheses_met == (fb.H_delta * 50 > 0.0));
  CHECK(fr.count == 50);
  CHECK_FALSE(fr.violation);
}

TEST_CASE("a close approach at the last step rejects the final time") {
  const double kappa1 = 2.0, b = 0.4, delta = 0.1;
  std::vector<double> ld(10, 3.0);
  std::vector<double> dist(10, 1.0);
  dist[9] = 0.5 * std::pow(kappa1, -b);
  Orbit o = synthetic_orbit(ld, dist, delta);
  HyperbolicTimeRecord rec = hyperbolic_times(o, kappa1, delta, b);
  CHECK(rec.times.size() == 9);
  CHECK(rec.times.back() == 9);
  CHECK(rec.times == brute_hyperbolic(o, kappa1, delta, b));
}

TEST_CASE("hyperbolic times agree with the literal checker and are monotone in kappa") {
  const CircleMap f = CircleMap::sine(5.0);
  const double lambda_hat = 2.7;
  const double delta = 0.01, b = default_b(1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Orbit o = iterate_orbit(f, NoiseStream(0.45, seed + 7), 0.3, 1000, {delta});
    const double k1 = std::exp(lambda_hat / 8.0);
    std::vector<std::size_t> fast = hyperbolic_times(o, k1, delta, b).times;
    CHECK(fast == brute_hyperbolic(o, k1, delta, b));
  }
}

TEST_CASE("hyperbolic times shrink as kappa grows when the distance family is vacuous") {
  const CircleMap f = CircleMap::sine(5.0);
  const double delta = 1e-9, b = default_b(1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Orbit o = iterate_orbit(f, NoiseStream(0.45, seed + 70), 0.3, 1000, {delta});
    if (o.Z[0].back() > 0.0) continue;
    for (double k1 : {1.1, 1.4, 2.0}) {
      auto loose = hyperbolic_times(o, k1, delta, b).times;
      auto strict = hyperbolic_times(o, k1 * 1.5, delta, b).times;
      std::set<std::size_t> base(loose.begin(), loose.end());
      for (std::size_t t : strict) CHECK(base.count(t) == 1);
    }
  }
}

TEST_CASE("frequency bound construction") {
  const double A = std::log(10.0 * kPi);
  FrequencyBound fb = make_frequency_bound(1.35, A, default_b(1.0));
  CHECK(fb.gamma1 == doctest::Approx(1.35 / (2.0 * A)));
  CHECK(fb.kappa1 == doctest::Approx(std::exp(1.35 / 8.0)));
  CHECK(fb.smallness_holds);
  CHECK(fb.gamma > 0.0);
  CHECK(fb.gamma < 1.0);
  CHECK(fb.gamma2 == fb.gamma2_consistent);
  CHECK(fb.gamma2_consistent <= fb.gamma2_printed);
  CHECK(H_of_delta(fb.delta) <= 0.5 * fb.gamma1 * fb.b * fb.lambda / 8.0);
  CHECK(H_of_delta(fb.delta * 1.001) > 0.5 * fb.gamma1 * fb.b * fb.lambda / 8.0);
  CHECK(default_b(1.0) < 0.5);
  CHECK(default_b(2.0) < 0.25);
}

TEST_CASE("frequency check: no claim when S_N is too small") {
  const CircleMap f = CircleMap::sine(5.0);
  FrequencyBound fb = make_frequency_bound(1.35, std::log(10.0 * kPi), default_b(1.0));
  Orbit o = iterate_orbit(f, NoiseStream(0.45, 3), 0.3, 200, {fb.delta});
  FrequencyBound greedy = fb;
  greedy.lambda = 100.0;
  FrequencyReport r = frequency_check(o, greedy, 200);
  CHECK_FALSE(r.hypotheses_met);
  CHECK(r.outcome == "no claim");
}

TEST_CASE("frequency check holds over random seeds") {
  const CircleMap f = CircleMap::sine(5.0);
  FrequencyBound fb = make_frequency_bound(1.35, std::log(10.0 * kPi), default_b(1.0));
  int met = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Orbit o = iterate_orbit(f, NoiseStream(0.45, 1000 + s), 0.3, 1000, {fb.delta});
    FrequencyReport r = frequency_check(o, fb, 1000);
    if (r.hypotheses_met) ++met;
    CHECK_FALSE(r.violation);
  }
  CHECK(met > 90);
}

TEST_CASE("interval hyperbolic times") {
  Orbit o = iterate_orbit(CircleMap::sine(3.0), NoiseStream(0.0, 1), 0.0, 30, {0.1});
  auto all = hyperbolic_times(o, 2.0, 0.1, 0.49).times;
  CHECK(interval_hyperbolic_times(o, Arc::full_circle(), 0.05, 2.0, 0.1, 0.49) == all);
  CHECK(interval_hyperbolic_times(o, Arc(0.0, 0.1), 0.05, 2.0, 0.1, 0.49).empty());
  auto centred = interval_hyperbolic_times(o, Arc(-0.05, 0.05), 0.05, 2.0, 0.1, 0.49);
  CHECK(centred == all);
  for (std::size_t n : centred) CHECK(0.05 * std::pow(2.0, -0.5 * n) <= 0.05);
  CHECK_THROWS_AS(interval_hyperbolic_times(o, Arc(0.2, 0.3), 0.05, 2.0, 0.1, 0.49), PreconditionError);
}

TEST_CASE("hyperbolic ball at the expanding fixed point matches the closed form") {
  const CircleMap f = CircleMap::sine(3.0);
  const double delta1 = 0.01;
  BallCheckReport r = hyperbolic_ball_check(f, {0.0, 0.0, 0.0}, 0.0, 3, delta1, 2.0);
  CHECK(r.pass());
  rhlab::mp::PrecisionScope scope(256);
  using rhlab::mp::Real;
  auto inv = [](const Real& y) { return rhlab::mp::asin(y / Real(3.0)) / (Real(2.0) * Real::pi()); };
  double hi = inv(inv(inv(Real(delta1)))).to_double();
  CHECK(r.J.hi == doctest::Approx(hi).epsilon(1e-14));
  CHECK(r.J.lo == doctest::Approx(-hi).epsilon(1e-14));
  CHECK(r.J_length == doctest::Approx(2.0 * delta1 / std::pow(6.0 * kPi, 3)).epsilon(1e-3));
}

TEST_CASE("hyperbolic ball with one step is a local inversion") {
  const CircleMap f = CircleMap::sine(5.0);
  const double w = 0.013, x = 0.1, delta1 = 1e-3;
  BallCheckReport r = hyperbolic_ball_check(f, {w}, x, 1, delta1, 1.5);
  CHECK(r.pass());
  double y = f.lift(x + w);
  CHECK(f.lift(r.J.lo + w) == doctest::Approx(y - delta1).epsilon(1e-12));
  CHECK(f.lift(r.J.hi + w) == doctest::Approx(y + delta1).epsilon(1e-12));
}

TEST_CASE("hyperbolic ball reports NotFound when delta1 is too large") {
  const CircleMap f = CircleMap::sine(5.0);
  CHECK_THROWS_AS(hyperbolic_ball_check(f, {0.0}, 0.24, 1, 0.2, 1.5), NotFound);
}

TEST_CASE("hyperbolic balls along multiprecision orbits") {
  const CircleMap f = CircleMap::sine(5.0);
  FrequencyBound fb = make_frequency_bound(1.35, std::log(10.0 * kPi), default_b(1.0));
  int checked = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    NoiseStream w(0.45, 500 + s);
    Orbit o = iterate_orbit_mp(f, w, 0.3, 30, {fb.delta}, 300);
    Orbit plain = iterate_orbit(f, w, 0.3, 30, {fb.delta});
    CHECK(o.points[3] == doctest::Approx(plain.points[3]).epsilon(1e-9));
    for (std::size_t n : hyperbolic_times(o, fb.kappa1, fb.delta, fb.b).times) {
      BallCheckReport r = hyperbolic_ball_check(f, w.prefix(n), 0.3, n, fb.delta / 2.0, fb.kappa1);
      CHECK(r.pass());
      ++checked;
    }
  }
  CHECK(checked > 20);
}
