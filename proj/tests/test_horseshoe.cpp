#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "rhlab/branches.hpp"
#include "rhlab/certifier.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/horseshoe.hpp"
#include "rhlab/mp_real.hpp"

using namespace rhlab;

namespace {

// Raw forward iteration of the lift, no reductions, no branch bookkeeping.
double raw_forward(const CircleMap& f, const NoiseStream& noise, double x, int n) {
  for (int t = 0; t < n; ++t) x = f.lift(x + noise[static_cast<std::uint64_t>(t)]);
  return x;
}

double raw_log_deriv(const CircleMap& f, const NoiseStream& noise, double x, int n) {
  double s = 0.0;
  for (int t = 0; t < n; ++t) {
    const double z = x + noise[static_cast<std::uint64_t>(t)];
    s += std::log(std::fabs(f.deriv(z)));
    x = f.lift(z);
  }
  return s;
}

// Does y lie in [lo, hi] + k for some integer k, up to tol?
bool in_translate(double y, double lo, double hi, double tol) {
  const double kmin = std::ceil(lo - tol - y);
  const double kmax = std::floor(hi + tol - y);
  return kmin <= kmax;
}

double max_circular_gap(std::vector<double> pts) {
  for (double& p : pts) p = wrap01(p);
  std::sort(pts.begin(), pts.end());
  double gap = pts.front() + 1.0 - pts.back();
  for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max(gap, pts[i] - pts[i - 1]);
  return gap;
}

}  // namespace

TEST_CASE("refine_branches: affine lift") {
  BranchSystem b = refine_branches(CircleMap::linear(3), NoiseStream(0.0, 1), Arc(0.0, 0.2), 1);
  REQUIRE(b.branches.size() == 1);
  CHECK(b.branches[0].image_lift.length() == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(b.branches[0].min_log_deriv == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(b.branches[0].domain.lo() == doctest::Approx(0.0));
  CHECK(b.branches[0].domain.hi() == doctest::Approx(0.2));
  CHECK(b.branches[0].orientation == 1);
  CHECK(b.pruned_mass == 0.0);
}

TEST_CASE("refine_branches: one critical preimage splits the arc") {
  BranchSystem b = refine_branches(CircleMap::sine(3.0), NoiseStream(0.0, 1), Arc(0.2, 0.3), 1);
  REQUIRE(b.branches.size() == 2);
  CHECK(b.branches[0].domain.lo() == doctest::Approx(0.2));
  CHECK(b.branches[0].domain.hi() == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(b.branches[1].domain.lo() == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(b.branches[1].domain.hi() == doctest::Approx(0.3));
  CHECK(b.branches[0].orientation == 1);
  CHECK(b.branches[1].orientation == -1);
  CHECK_THROWS_AS(refine_branches(CircleMap::sine(3.0), NoiseStream(0.0, 1), Arc(0.2, 0.3), 0), PreconditionError);
}

TEST_CASE("refine_branches: union of images matches a pointwise image at depth 6") {
  const CircleMap f = CircleMap::sine(5.0);
  const NoiseStream noise(0.45, 11);
  const Arc I(0.1, 0.2);
  BranchSystem b = refine_branches(f, noise, I, 6);
  double total = 0.0;
  for (const auto& br : b.branches) total += br.image_lift.length();
  CHECK(total >= 1.0);

  // Coverage of the branch-image union on a 1e-3 grid versus the sampled image.
  constexpr int kBins = 1000;
  std::vector<char> union_bins(kBins, 0), sample_bins(kBins, 0);
  for (const auto& br : b.branches) {
    if (br.image_lift.length() >= 1.0) {
      std::fill(union_bins.begin(), union_bins.end(), 1);
      break;
    }
    const double lo = br.image_lift.lo * kBins;
    const double hi = br.image_lift.hi * kBins;
    for (long k = static_cast<long>(std::floor(lo)); k < static_cast<long>(std::ceil(hi)); ++k) {
      union_bins[static_cast<std::size_t>(((k % kBins) + kBins) % kBins)] = 1;
    }
  }
  constexpr int kSamples = 100000;
  for (int s = 0; s < kSamples; ++s) {
    const double x = 0.1 + 0.1 * (s + 0.5) / kSamples;
    const double y = wrap01(raw_forward(f, noise, x, 6));
    sample_bins[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>(y * kBins)))] = 1;
  }
  int diff = 0;
  for (int k = 0; k < kBins; ++k) diff += union_bins[static_cast<std::size_t>(k)] != sample_bins[static_cast<std::size_t>(k)];
  CHECK(static_cast<double>(diff) / kBins < 1e-4 + 1e-12);
}

TEST_CASE("refine_branches: short image agrees with the sampled hull") {
  const CircleMap f = CircleMap::sine(5.0);
  const NoiseStream noise(0.0, 1);
  BranchSystem b = refine_branches(f, noise, Arc(0.1, 0.101), 1);
  REQUIRE(b.branches.size() == 1);
  double lo = INFINITY, hi = -INFINITY;
  for (int s = 0; s <= 100000; ++s) {
    double y = raw_forward(f, noise, 0.1 + 0.001 * s / 100000.0, 1);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  const double shift = std::floor(lo);
  const double sym = std::fabs(b.branches[0].image_lift.lo - (lo - shift)) +
                     std::fabs(b.branches[0].image_lift.hi - (hi - shift));
  CHECK(sym < 1e-4);
}

TEST_CASE("branch soundness and partition") {
  const CircleMap f = CircleMap::sine(5.0);
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const NoiseStream noise(0.45, seed);
    const Arc I(0.05 * static_cast<double>(seed), 0.05 * static_cast<double>(seed) + 0.07);
    BranchSystem b = refine_branches(f, noise, I, 3);
    double covered = 0.0;
    for (std::size_t i = 0; i < b.branches.size(); ++i) {
      const auto& br = b.branches[i];
      covered += br.domain.length();
      CHECK(br.domain.lo() >= I.lo() - 1e-12);
      CHECK(br.domain.hi() <= I.hi() + 1e-12);
      if (i > 0) CHECK(br.domain.lo() >= b.branches[i - 1].domain.hi() - 1e-12);
      CHECK(br.image_lift.length() >= br.domain.length() * std::exp(br.min_log_deriv) * (1.0 - 1e-9));
      double prev = NAN;
      for (int s = 0; s < 64; ++s) {
        const double x = br.domain.lo() + br.domain.length() * (s + 0.5) / 64.0;
        const double y = raw_forward(f, noise, x, 3);
        CHECK(in_translate(y, br.image_lift.lo, br.image_lift.hi, kGeoTolerance));
        CHECK(raw_log_deriv(f, noise, x, 3) >= br.min_log_deriv - 1e-9);
        if (!std::isnan(prev)) CHECK((y - prev) * br.orientation > 0.0);
        prev = y;
      }
    }
    CHECK(std::fabs(covered + b.pruned_mass - I.length()) < 1e-12);
  }
}

TEST_CASE("branch explosion cap") {
  CHECK_THROWS_AS(refine_branches(CircleMap::sine(5.0), NoiseStream(0.45, 11), Arc(0.1, 0.2), 4, 500),
                  BranchExplosion);
}

TEST_CASE("full_branch_time on the reference arc") {
  for (double L : {9.0, 25.0}) {
    const CircleMap f = CircleMap::sine(L);
    const double R = std::max(3.0, std::sqrt(L));
    const Arc delta = delta_reference(f, R);
    FullBranchResult r = full_branch_time(f, NoiseStream(0.0, 5), delta, R - 1e-9);
    CHECK(r.m <= 1);
    CHECK(r.min_log_deriv > std::log(R - 1e-9));
  }
}

TEST_CASE("full_branch_time edge cases") {
  const CircleMap f = CircleMap::sine(5.0);
  CHECK(full_branch_time(f, NoiseStream(0.45, 1), Arc::full_circle(), 1.5).m == 0);
  CHECK_THROWS_AS(full_branch_time(f, NoiseStream(0.45, 1), Arc(0.1, 0.2), 1.0), PreconditionError);
  FullBranchOptions opt;
  opt.n_max = 1;
  try {
    full_branch_time(f, NoiseStream(0.0, 1), Arc(0.1, 0.1001), 1.5, opt);
    FAIL("expected a timeout");
  } catch (const TimeoutError& e) {
    CHECK(e.n_max() == 1);
    CHECK(e.max_image_length() > 0.0);
    CHECK(e.max_image_length() < 1.0);
  }
}

TEST_CASE("full_branch_time is finite on 500 seeds") {
  const CircleMap f = CircleMap::sine(5.0);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    FullBranchResult r = full_branch_time(f, NoiseStream(0.45, s), Arc(0.1, 0.2), 1.5);
    CHECK(r.m >= 1);
    CHECK(r.m <= 200);
    sum += r.m;
  }
  MESSAGE("mean m over 500 seeds: " << sum / 500.0);
}

TEST_CASE("cover soundness") {
  const CircleMap f = CircleMap::sine(5.0);
  for (std::uint64_t s = 0; s < 40; ++s) {
    const NoiseStream noise(0.45, s);
    FullBranchResult r = full_branch_time(f, noise, Arc(0.1 + 0.01 * s, 0.15 + 0.01 * s), 1.5);
    std::vector<double> img;
    bool expanding = true;
    for (int k = 0; k < 1000; ++k) {
      const double x = r.J.lo + r.J.length() * (k + 0.5) / 1000.0;
      img.push_back(raw_forward(f, noise, x, r.m));
      expanding = expanding && raw_log_deriv(f, noise, x, r.m) > std::log(1.5);
    }
    CHECK(expanding);
    CHECK(max_circular_gap(img) <= 2e-3);
    CHECK(std::fabs(img.back() - img.front()) <= 1.0);
    CHECK(r.J.lo >= 0.1 + 0.01 * s - 1e-12);
    CHECK(r.J.hi <= 0.15 + 0.01 * s + 1e-12);
  }
}

TEST_CASE("full_branch_time is monotone under inclusion") {
  const CircleMap f = CircleMap::sine(5.0);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    const NoiseStream noise(0.45, 1000 + s);
    const double c = u(rng);
    std::vector<double> lengths{0.004, 0.01, 0.03, 0.08, 0.2};
    int prev = 1 << 30;
    for (double len : lengths) {
      FullBranchOptions opt;
      opt.n_max = 8;
      int m;
      try {
        m = full_branch_time(f, noise, Arc(c - len / 2, c + len / 2), 1.5, opt).m;
      } catch (const TimeoutError&) {
        m = 1 << 29;
      }
      CHECK(m <= prev);
      prev = m;
      ++compared;
    }
  }
  CHECK(compared == 300);
}

TEST_CASE("source expansion policies") {
  const CircleMap f = CircleMap::sine(5.0);
  FullBranchOptions enforce, off;
  enforce.policy = SourceExpansionPolicy::Enforce;
  off.policy = SourceExpansionPolicy::Off;
  int enforced_timeouts = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const NoiseStream noise(0.45, s);
    const Arc I(0.1, 0.2);
    const int mw = full_branch_time(f, noise, I, 1.5).m;
    CHECK(full_branch_time(f, noise, I, 1.5, off).m <= mw);
    const double w0 = noise[0];
    const bool expanding = f.min_abs_deriv(0.1 + w0, 0.2 + w0) > 1.0;
    if (expanding) {
      CHECK(full_branch_time(f, noise, I, 1.5, enforce).m == mw);
    } else {
      CHECK_THROWS_AS(full_branch_time(f, noise, I, 1.5, enforce), TimeoutError);
      ++enforced_timeouts;
    }
  }
  CHECK(enforced_timeouts > 0);
  CHECK(source_policy_from_string("enforce") == SourceExpansionPolicy::Enforce);
  CHECK(to_string(SourceExpansionPolicy::Off) == "off");
  CHECK_THROWS_AS(source_policy_from_string("sometimes"), PreconditionError);
}

TEST_CASE("horseshoe rejects overlapping arcs") {
  const CircleMap f = CircleMap::sine(5.0);
  CHECK_THROWS_AS(horseshoe_returns(f, NoiseStream(0.45, 1), Arc(0.1, 0.2), Arc(0.15, 0.25), 3, 1.5),
                  PreconditionError);
  CHECK_THROWS_AS(horseshoe_returns(f, NoiseStream(0.45, 1), Arc(0.9, 1.05), Arc(0.0, 0.1), 3, 1.5),
                  PreconditionError);
}

TEST_CASE("horseshoe on the halves of the reference arc") {
  const CircleMap f = CircleMap::sine(9.0);
  const Arc d = delta_reference(f, 3.0);
  const double c = d.mid();
  const Arc I0(d.lo(), c - 1e-6), I1(c + 1e-6, d.hi());
  HorseshoeRecord rec = horseshoe_returns(f, NoiseStream(0.0, 1), I0, I1, 1, 2.9);
  REQUIRE(rec.returns.size() == 2);
  CHECK(rec.returns[1] <= 1);
  REQUIRE(rec.cylinders.size() == 4);
  for (const auto& cyl : rec.cylinders) {
    CHECK(cyl.e1);
    CHECK(cyl.e2);
    CHECK(cyl.chain.depth() == 1);
  }
}

namespace {

// Independent multiprecision forward check of a cylinder against the raw noise.
void oracle_check_cylinder(const CircleMap& f, const HorseshoeRecord& rec, const Cylinder& c) {
  const int t0 = rec.returns[static_cast<std::size_t>(c.k)];
  const int d = rec.returns[static_cast<std::size_t>(c.k) + 1] - t0;
  mp::PrecisionScope scope(512);
  mp::Real lo = mp::Real::from_string(c.J_lo_decimal);
  mp::Real hi = mp::Real::from_string(c.J_hi_decimal);
  const Arc& Ii = rec.arc(c.i);
  const Arc& Ij = rec.arc(c.j);
  CHECK(Ii.depth(lo.to_double()) >= -kGeoTolerance);
  CHECK(Ii.depth(hi.to_double()) >= -kGeoTolerance);
  for (int t = 0; t < d; ++t) {
    mp::Real w(rec.noise[static_cast<std::uint64_t>(t0 + t)]);
    lo = f.lift(lo + w);
    hi = f.lift(hi + w);
  }
  if (hi < lo) std::swap(lo, hi);
  const double len = (hi - lo).to_double();
  CHECK(std::fabs(len - Ij.length()) <= kGeoTolerance);
  const double off = wrap01(lo.to_double() - Ij.lo() + 0.5) - 0.5;
  CHECK(std::fabs(off) <= kGeoTolerance);
  // Sampled log-derivative of the composition exceeds log kappa.
  const NoiseStream shifted = rec.noise.shifted(static_cast<std::uint64_t>(t0));
  for (int s = 0; s < 16; ++s) {
    const double x = c.J.lo + (c.J.hi - c.J.lo) * (s + 0.5) / 16.0;
    CHECK(raw_log_deriv(f, shifted, x, d) > std::log(rec.kappa));
  }
}

}  // namespace

TEST_CASE("horseshoe returns and cylinders for L=5 seed 3") {
  const CircleMap f = CircleMap::sine(5.0);
  HorseshoeRecord rec = horseshoe_returns(f, NoiseStream(0.45, 3), Arc(0.1, 0.2), Arc(0.6, 0.7), 20, 1.5);
  REQUIRE(rec.returns.size() == 21);
  CHECK(rec.K() == 20);
  for (int k = 0; k < 20; ++k) {
    CHECK(rec.returns[k + 1] > rec.returns[k]);
    CHECK(rec.returns[k + 1] - rec.returns[k] == std::max(rec.m0[k], rec.m1[k]));
  }
  REQUIRE(rec.cylinders.size() == 80);
  for (const auto& c : rec.cylinders) {
    CHECK(c.e1);
    CHECK(c.e2);
    CHECK(c.image_error <= kGeoTolerance);
    CHECK(c.chain.depth() == static_cast<std::size_t>(rec.returns[c.k + 1] - rec.returns[c.k]));
    oracle_check_cylinder(f, rec, c);
  }
}

TEST_CASE("return increments read from the shifted stream") {
  const CircleMap f = CircleMap::sine(5.0);
  const NoiseStream noise(0.45, 8);
  HorseshoeOptions opt;
  opt.cylinder_returns = 0;
  HorseshoeRecord rec = horseshoe_returns(f, noise, Arc(0.1, 0.2), Arc(0.6, 0.7), 10, 1.5, opt);
  CHECK(rec.cylinders.empty());
  for (int k = 0; k < 10; ++k) {
    const NoiseStream nk = noise.shifted(static_cast<std::uint64_t>(rec.returns[k]));
    CHECK(rec.m0[k] == full_branch_time(f, nk, Arc(0.1, 0.2), 1.5).m);
    CHECK(rec.m1[k] == full_branch_time(f, nk, Arc(0.6, 0.7), 1.5).m);
  }
}

TEST_CASE("cylinder semigroup property") {
  const CircleMap f = CircleMap::sine(5.0);
  HorseshoeRecord rec = horseshoe_returns(f, NoiseStream(0.45, 21), Arc(0.1, 0.2), Arc(0.6, 0.7), 12, 1.5);
  int tested = 0;
  for (const auto& c : rec.cylinders) {
    const std::size_t d = c.chain.depth();
    if (d < 2) continue;
    const std::size_t h = d / 2;
    BranchChain first = c.chain, second = c.chain;
    first.steps.assign(c.chain.steps.begin(), c.chain.steps.begin() + static_cast<long>(h));
    second.steps.assign(c.chain.steps.begin() + static_cast<long>(h), c.chain.steps.end());
    const Arc& Ij = rec.arc(c.j);
    const Interval target{Ij.lo() + static_cast<double>(c.p), Ij.lo() + static_cast<double>(c.p) + Ij.length()};
    const Interval whole = pull_back(f, c.chain, target).levels.front();
    const Interval mid = pull_back(f, second, target).levels.front();
    const Interval chained = pull_back(f, first, mid).levels.front();
    CHECK(std::fabs(whole.lo - chained.lo) <= kGeoTolerance);
    CHECK(std::fabs(whole.hi - chained.hi) <= kGeoTolerance);
    ++tested;
  }
  CHECK(tested > 0);
}

TEST_CASE("shadowing") {
  const CircleMap f = CircleMap::sine(5.0);
  HorseshoeRecord rec = horseshoe_returns(f, NoiseStream(0.45, 3), Arc(0.1, 0.2), Arc(0.6, 0.7), 20, 1.5);

  ShadowResult single = shadow(f, rec, {1});
  CHECK(single.verified);
  CHECK(rec.I1.contains(single.x));

  std::vector<int> zeros(21, 0);
  ShadowResult z = shadow(f, rec, zeros);
  CHECK(z.verified);
  for (double dpt : z.depths) CHECK(dpt >= -kGeoTolerance);

  std::vector<int> alt;
  for (int k = 0; k <= 15; ++k) alt.push_back(k % 2);
  ShadowResult a = shadow(f, rec, alt);
  CHECK(a.verified);
  CHECK(a.times.size() == 16);
  CHECK(rec.I0.contains(a.x));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> sym(21);
    for (int& s : sym) s = static_cast<int>(rng() & 1u);
    ShadowResult r = shadow(f, rec, sym);
    CHECK(r.verified);
    CHECK(rec.arc(sym[0]).contains(r.x));
  }
  CHECK_THROWS_AS(shadow(f, rec, std::vector<int>(22, 0)), PreconditionError);
  CHECK_THROWS_AS(shadow(f, rec, {0, 2}), PreconditionError);
  HorseshoeOptions bare;
  bare.cylinder_returns = 0;
  HorseshoeRecord no_cyl = horseshoe_returns(f, NoiseStream(0.45, 3), Arc(0.1, 0.2), Arc(0.6, 0.7), 3, 1.5, bare);
  CHECK_THROWS_AS(shadow(f, no_cyl, {0, 1}), PreconditionError);
}

TEST_CASE("density with a constant return law") {
  // Arcs of length 0.1 under x -> 3x first cover the circle at step 3.
  const CircleMap f = CircleMap::linear(3);
  std::vector<std::uint64_t> seeds(100);
  std::iota(seeds.begin(), seeds.end(), 0);
  DensityReport d = density_report(f, 0.3, seeds, Arc(0.1, 0.2), Arc(0.6, 0.7), 10, 1.5);
  CHECK(d.mean_n0 == 3.0);
  for (double r : d.ratio) CHECK(r == 3.0);
  CHECK(d.fraction_within == 1.0);
  CHECK(d.increment_lag1 == 0.0);
  CHECK_THROWS_AS(density_report(f, 0.3, std::vector<std::uint64_t>(10, 1), Arc(0.1, 0.2), Arc(0.6, 0.7), 10, 1.5),
                  PreconditionError);
}

TEST_CASE("density_from_returns on a synthetic i.i.d. law") {
  std::mt19937_64 rng(17);
  std::vector<std::vector<int>> returns;
  for (int s = 0; s < 300; ++s) {
    std::vector<int> r{0};
    for (int k = 0; k < 50; ++k) r.push_back(r.back() + 1 + static_cast<int>(rng() % 2));
    returns.push_back(r);
  }
  DensityReport d = density_from_returns(returns);
  CHECK(d.mean_n0 == doctest::Approx(1.5).epsilon(0.1));
  CHECK(std::fabs(d.increment_lag1) < 0.05);
  CHECK(d.increment_ks.p_value > 1e-3);
  CHECK(d.fraction_within > 0.9);
}

TEST_CASE("survival of m on the reference arc") {
  const CircleMap f = CircleMap::sine(9.0);
  const Arc delta = delta_reference(f, 3.0);
  std::vector<std::uint64_t> seeds(1000);
  std::iota(seeds.begin(), seeds.end(), 0);
  SurvivalMReport s = survival_m(f, 0.0, seeds, delta, 3.0 - 1e-9, 5);
  CHECK(s.rows[1].p == 0.0);
  CHECK(s.rows[0].p == 1.0);
  CHECK(s.timeouts == 0);
  CHECK(s.consistent);
}

TEST_CASE("survival of m for L=5") {
  const CircleMap f = CircleMap::sine(5.0);
  std::vector<std::uint64_t> seeds(2000);
  std::iota(seeds.begin(), seeds.end(), 0);
  SurvivalMReport s = survival_m(f, 0.45, seeds, Arc(0.1, 0.2), 1.5, 20, 2);
  CHECK(s.nonincreasing);
  CHECK(s.timeouts == 0);
  CHECK(std::isfinite(s.mean));
  CHECK(std::isfinite(s.second_moment));
  CHECK(s.second_moment_change < 0.1);
  CHECK(s.consistent);
  SurvivalMReport again = survival_m(f, 0.45, seeds, Arc(0.1, 0.2), 1.5, 20, 1);
  CHECK(again.m == s.m);
}

TEST_CASE("survival fit diagnostics on synthetic samples") {
  std::mt19937_64 rng(3);
  std::geometric_distribution<int> geo(0.5);
  std::vector<int> m(20000);
  for (int& v : m) v = 1 + geo(rng);
  SurvivalMReport s = survival_from_samples(m, 200, 12);
  CHECK(s.geometric_dominates);
  CHECK(s.geometric_rate == doctest::Approx(0.5).epsilon(0.1));
  CHECK(s.consistent);
}

TEST_CASE("H4 estimate") {
  const CircleMap f = CircleMap::sine(5.0);
  H4Estimate h = estimate_h4(f, 0.45, 0.05, 1.5, 4, 200, 8, 42, 2);
  CHECK(h.K >= 1);
  CHECK(h.K <= 4);
  CHECK(h.iota > 0.0);
  CHECK(h.iota_by_K.size() == 4);
  for (std::size_t k = 1; k < h.iota_by_K.size(); ++k) CHECK(h.iota_by_K[k] >= h.iota_by_K[k - 1]);
}
