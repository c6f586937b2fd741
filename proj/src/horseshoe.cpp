#include "rhlab/horseshoe.hpp"

#include <algorithm>
#include <cmath>

#include "rhlab/errors.hpp"
#include "rhlab/mp_real.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

namespace {

// Integers in [first, last] ordered from the middle outwards.
std::vector<long> center_out(long first, long last) {
  std::vector<long> out;
  if (first > last) return out;
  const long c = first + (last - first) / 2;
  out.push_back(c);
  for (long d = 1; c - d >= first || c + d <= last; ++d) {
    if (c + d <= last) out.push_back(c + d);
    if (c - d >= first) out.push_back(c - d);
  }
  return out;
}

struct WindowHit {
  Interval window;
  Pullback pullback;
};

std::optional<WindowHit> try_windows(const CircleMap& map, const BranchChain& chain, double log_kappa,
                                     SourceExpansionPolicy policy, int lattice) {
  const double W = static_cast<double>(lattice);
  const long first = static_cast<long>(std::ceil(chain.image.lo * W));
  const long last = static_cast<long>(std::floor((chain.image.hi - 1.0) * W));
  for (long t : center_out(first, last)) {
    const Interval window{static_cast<double>(t) / W, static_cast<double>(t) / W + 1.0};
    Pullback pb = pull_back(map, chain, window);
    if (!(pb.min_log_deriv > log_kappa)) continue;
    if (policy == SourceExpansionPolicy::Witness && !(pb.step_min_log.front() > 0.0)) continue;
    return WindowHit{window, std::move(pb)};
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(SourceExpansionPolicy p) {
  switch (p) {
    case SourceExpansionPolicy::Witness: return "witness";
    case SourceExpansionPolicy::Enforce: return "enforce";
    case SourceExpansionPolicy::Off: return "off";
  }
  return "witness";
}

SourceExpansionPolicy source_policy_from_string(const std::string& s) {
  if (s == "witness") return SourceExpansionPolicy::Witness;
  if (s == "enforce") return SourceExpansionPolicy::Enforce;
  if (s == "off") return SourceExpansionPolicy::Off;
  throw PreconditionError("unknown source expansion policy '" + s + "'");
}

FullBranchResult full_branch_time(const CircleMap& map, const NoiseStream& noise, const Arc& I, double kappa,
                                  const FullBranchOptions& options) {
  require(kappa > 1.0, "full_branch_time: kappa > 1 required");
  require(options.n_max >= 1, "full_branch_time: n_max >= 1 required");
  require(options.window_lattice >= 1, "full_branch_time: window_lattice >= 1 required");
  const Arc src = I.normalized();
  FullBranchResult res;
  if (src.is_full()) {
    res.m = 0;
    res.J = {src.lo(), src.lo() + 1.0};
    res.window = res.J;
    res.chain.source = res.J;
    res.chain.image = res.J;
    res.max_image_length = 1.0;
    return res;
  }
  const double log_kappa = std::log(kappa);
  if (options.policy == SourceExpansionPolicy::Enforce) {
    const double w0 = noise[0];
    if (!(map.min_abs_deriv(src.lo() + w0, src.hi() + w0) > 1.0)) {
      throw TimeoutError("full_branch_time: tracked arc leaves {|dg| > 1} at the first step", options.n_max, 0.0);
    }
  }
  BranchTree tree(map, noise, src, options.branch_cap);
  std::vector<int> level{0};
  res.max_image_length = src.length();
  for (int n = 1; n <= options.n_max && !level.empty(); ++n) {
    std::vector<int> next;
    for (int id : level) {
      std::vector<int> kids = tree.expand(id);
      next.insert(next.end(), kids.begin(), kids.end());
    }
    for (int id : next) {
      const BranchNode& node = tree.node(id);
      res.max_image_length = std::max(res.max_image_length, node.image.length());
      if (node.image.length() < 1.0 || !(node.cum_max_log > log_kappa)) continue;
      BranchChain chain = tree.chain(id);
      auto hit = try_windows(map, chain, log_kappa, options.policy, options.window_lattice);
      if (!hit) continue;
      res.m = n;
      res.window = hit->window;
      res.J = hit->pullback.levels.front();
      res.min_log_deriv = hit->pullback.min_log_deriv;
      res.first_step_log_deriv = hit->pullback.step_min_log.front();
      res.chain = std::move(chain);
      res.nodes = tree.size();
      return res;
    }
    level = std::move(next);
  }
  throw TimeoutError("full_branch_time: no full branch within " + std::to_string(options.n_max) + " steps",
                     options.n_max, res.max_image_length);
}

bool verify_cylinder(const CircleMap& map, Cylinder& c, const Arc& Ij, double kappa) {
  const int bits = chain_precision_bits(map, c.chain.depth());
  mp::PrecisionScope scope(bits);
  const mp::Real p(static_cast<double>(c.p));
  const Arc tgt = Ij.normalized();
  MpInterval target{mp::Real(tgt.lo()) + p, mp::Real(tgt.lo()) + p + mp::Real(tgt.length())};
  PullbackMP pb = pull_back_mp(map, c.chain, target);
  const MpInterval& J = pb.levels.front();
  c.J = {J.lo.to_double(), J.hi.to_double()};
  const int digits = bits * 3 / 10;
  c.J_lo_decimal = J.lo.to_string(digits);
  c.J_hi_decimal = J.hi.to_string(digits);
  c.min_log_deriv = pb.min_log_deriv;

  mp::Real e1 = push_forward_mp(map, c.chain, J.lo);
  mp::Real e2 = push_forward_mp(map, c.chain, J.hi);
  if (e2 < e1) std::swap(e1, e2);
  c.image_error = std::max(mp::abs(e1 - target.lo).to_double_up(), mp::abs(e2 - target.hi).to_double_up());
  const double slack = kGeoTolerance;
  const bool inside = (J.lo - mp::Real(c.chain.source.lo)).to_double() >= -slack &&
                      (mp::Real(c.chain.source.hi) - J.hi).to_double() >= -slack;
  c.e1 = c.image_error <= kGeoTolerance && inside;
  c.e2 = c.min_log_deriv > std::log(kappa);
  return c.e1 && c.e2;
}

Cylinder find_cylinder(const CircleMap& map, const NoiseStream& noise, const Arc& Ii, const Arc& Ij, int depth,
                       double kappa, std::size_t branch_cap) {
  require(depth >= 1, "find_cylinder: depth >= 1 required");
  require(kappa > 1.0, "find_cylinder: kappa > 1 required");
  const double log_kappa = std::log(kappa);
  const double log_sup = std::log(std::max(1.0, map.sup_abs_deriv()));
  const Arc tgt = Ij.normalized();
  BranchTree tree(map, noise, Ii, branch_cap);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const BranchNode node = tree.node(id);
    const double reachable = node.cum_max_log + static_cast<double>(depth - node.depth) * log_sup;
    if (!(reachable > log_kappa)) continue;
    if (node.depth == depth) {
      const long first = static_cast<long>(std::ceil(node.image.lo - tgt.lo()));
      const long last = static_cast<long>(std::floor(node.image.hi - tgt.lo() - tgt.length()));
      if (first > last) continue;
      BranchChain chain = tree.chain(id);
      for (long p : center_out(first, last)) {
        const double lo = tgt.lo() + static_cast<double>(p);
        Pullback pb = pull_back(map, chain, {lo, lo + tgt.length()});
        if (!(pb.min_log_deriv > log_kappa)) continue;
        Cylinder c;
        c.p = p;
        c.chain = chain;
        if (verify_cylinder(map, c, tgt, kappa)) return c;
      }
      continue;
    }
    std::vector<int> kids = tree.expand(id);
    std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
      return tree.node(a).image.length() < tree.node(b).image.length();
    });
    stack.insert(stack.end(), kids.begin(), kids.end());
  }
  throw CylinderNotFound("find_cylinder: no depth-" + std::to_string(depth) + " branch from " + Ii.to_string() +
                         " covers " + Ij.to_string() + " with expansion > kappa");
}

HorseshoeRecord horseshoe_returns(const CircleMap& map, const NoiseStream& noise, const Arc& I0, const Arc& I1,
                                  int K_count, double kappa, const HorseshoeOptions& options) {
  require(!I0.intersects(I1), "horseshoe_returns: I0 and I1 must be disjoint");
  require(K_count >= 1, "horseshoe_returns: K_count >= 1 required");
  require(kappa > 1.0, "horseshoe_returns: kappa > 1 required");
  HorseshoeRecord rec;
  rec.I0 = I0.normalized();
  rec.I1 = I1.normalized();
  rec.kappa = kappa;
  rec.seed = noise.seed();
  rec.sigma = noise.sigma();
  rec.noise = noise;
  rec.returns.push_back(0);
  const int with_cylinders = options.cylinder_returns < 0 ? K_count : std::min(K_count, options.cylinder_returns);
  int t = 0;
  for (int k = 0; k < K_count; ++k) {
    const NoiseStream nk = noise.shifted(static_cast<std::uint64_t>(t));
    const int a = full_branch_time(map, nk, rec.I0, kappa, options.full_branch).m;
    const int b = full_branch_time(map, nk, rec.I1, kappa, options.full_branch).m;
    const int d = std::max(a, b);
    if (d < 1) throw InvariantViolation("horseshoe_returns: zero return increment");
    rec.m0.push_back(a);
    rec.m1.push_back(b);
    if (k < with_cylinders) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          Cylinder c = find_cylinder(map, nk, rec.arc(i), rec.arc(j), d, kappa, options.full_branch.branch_cap);
          c.k = k;
          c.i = i;
          c.j = j;
          rec.cylinders.push_back(std::move(c));
        }
      }
    }
    t += d;
    rec.returns.push_back(t);
  }
  return rec;
}

ShadowResult shadow(const CircleMap& map, const HorseshoeRecord& record, const std::vector<int>& symbols,
                    bool throw_on_failure) {
  require(!symbols.empty() && symbols.size() <= record.returns.size(),
          "shadow: 1 <= len(symbols) <= number of return times required");
  for (int s : symbols) require(s == 0 || s == 1, "shadow: symbols must be 0 or 1");
  const int last = static_cast<int>(symbols.size()) - 1;
  for (int k = 0; k < last; ++k) {
    require(record.has_cylinders(k), "shadow: record lacks cylinders for return " + std::to_string(k));
  }
  ShadowResult res;
  const int horizon = record.returns[static_cast<std::size_t>(last)];
  res.precision_bits = chain_precision_bits(map, static_cast<std::size_t>(horizon)) + 16;
  mp::PrecisionScope scope(res.precision_bits);

  const Arc& end_arc = record.arc(symbols.back());
  MpInterval X{mp::Real(end_arc.lo()), mp::Real(end_arc.lo()) + mp::Real(end_arc.length())};
  for (int k = last - 1; k >= 0; --k) {
    const Cylinder& c = record.cylinder(k, symbols[static_cast<std::size_t>(k)],
                                        symbols[static_cast<std::size_t>(k) + 1]);
    const mp::Real p(static_cast<double>(c.p));
    X = pull_back_mp(map, c.chain, {X.lo + p, X.hi + p}).levels.front();
  }
  const mp::Real x = (X.lo + X.hi) * mp::Real(0.5);
  res.x = x.to_double();
  res.x_decimal = x.to_string(res.precision_bits * 3 / 10);

  mp::Real y = x;
  int t = 0;
  res.verified = true;
  for (int k = 0; k <= last; ++k) {
    const int target = record.returns[static_cast<std::size_t>(k)];
    for (; t < target; ++t) {
      y = map.lift(y + mp::Real(record.noise[static_cast<std::uint64_t>(t)]));
      y = y - mp::floor(y);
    }
    const double pos = wrap01(y.to_double());
    const double depth = record.arc(symbols[static_cast<std::size_t>(k)]).depth(pos);
    res.times.push_back(target);
    res.positions.push_back(pos);
    res.depths.push_back(depth);
    if (depth < -kGeoTolerance && res.verified) {
      res.verified = false;
      res.first_failure = k;
    }
  }
  if (!res.verified && throw_on_failure) {
    throw VerificationFailed("shadow: orbit misses I_{s_k} at return k = " + std::to_string(res.first_failure) +
                             " (depth " + std::to_string(res.depths[static_cast<std::size_t>(res.first_failure)]) +
                             ")");
  }
  return res;
}

DensityReport density_from_returns(const std::vector<std::vector<int>>& returns, double tolerance) {
  require(!returns.empty(), "density_from_returns: no sequences");
  DensityReport rep;
  rep.seeds = returns.size();
  rep.tolerance = tolerance;
  rep.K = static_cast<int>(returns.front().size()) - 1;
  require(rep.K >= 2, "density_from_returns: at least two returns per seed required");
  for (const auto& r : returns) {
    require(static_cast<int>(r.size()) - 1 == rep.K, "density_from_returns: ragged return sequences");
  }
  double sum_n0 = 0.0;
  std::vector<double> all, first_half, second_half;
  for (const auto& r : returns) {
    sum_n0 += r[1] - r[0];
    for (int k = 0; k < rep.K; ++k) {
      const double inc = r[static_cast<std::size_t>(k) + 1] - r[static_cast<std::size_t>(k)];
      all.push_back(inc);
      (k < rep.K / 2 ? first_half : second_half).push_back(inc);
    }
  }
  rep.mean_n0 = sum_n0 / static_cast<double>(rep.seeds);
  std::size_t within = 0;
  for (const auto& r : returns) {
    const double ratio = static_cast<double>(r.back()) / rep.K;
    const double err = std::fabs(ratio - rep.mean_n0) / rep.mean_n0;
    rep.ratio.push_back(ratio);
    rep.relative_error.push_back(err);
    if (err < tolerance) ++within;
  }
  rep.fraction_within = static_cast<double>(within) / static_cast<double>(rep.seeds);

  const stats::MeanSe ms = stats::mean_se(all);
  rep.increment_mean = ms.mean;
  rep.increment_var = ms.sd * ms.sd;
  double num = 0.0, den = 0.0;
  std::size_t pairs = 0;
  for (const auto& r : returns) {
    for (int k = 0; k < rep.K; ++k) {
      const double a = r[static_cast<std::size_t>(k) + 1] - r[static_cast<std::size_t>(k)] - ms.mean;
      den += a * a;
      if (k + 1 < rep.K) {
        const double b = r[static_cast<std::size_t>(k) + 2] - r[static_cast<std::size_t>(k) + 1] - ms.mean;
        num += a * b;
        ++pairs;
      }
    }
  }
  rep.increment_lag1 = den > 0.0 ? (num / static_cast<double>(pairs)) / (den / static_cast<double>(all.size())) : 0.0;
  rep.increment_ks = stats::ks_two_sample(first_half, second_half);
  return rep;
}

DensityReport density_report(const CircleMap& map, double sigma, const std::vector<std::uint64_t>& seeds,
                             const Arc& I0, const Arc& I1, int K_count, double kappa, int threads,
                             const FullBranchOptions& options) {
  require(seeds.size() >= 100, "density_report: at least 100 seeds required");
  std::vector<std::vector<int>> returns(seeds.size());
  HorseshoeOptions ho;
  ho.full_branch = options;
  ho.cylinder_returns = 0;
  parallel_for(seeds.size(), threads, [&](std::size_t s) {
    returns[s] = horseshoe_returns(map, NoiseStream(sigma, seeds[s]), I0, I1, K_count, kappa, ho).returns;
  });
  return density_from_returns(returns);
}

SurvivalMReport survival_from_samples(std::vector<int> m, int n_max, int l_max) {
  require(!m.empty(), "survival_from_samples: no samples");
  require(l_max >= 1, "survival_from_samples: l_max >= 1 required");
  SurvivalMReport rep;
  rep.m = std::move(m);
  const std::size_t N = rep.m.size();
  for (int v : rep.m) {
    if (v > n_max) ++rep.timeouts;
  }
  double prev = 1.0;
  for (int l = 0; l <= l_max; ++l) {
    std::size_t above = 0;
    for (int v : rep.m) above += v > l ? 1 : 0;
    SurvivalMRow row;
    row.l = l;
    row.ci = stats::wilson(above, N);
    row.p = row.ci.p_hat;
    if (row.p > prev) rep.nonincreasing = false;
    prev = row.p;
    rep.rows.push_back(row);
  }
  auto moment2 = [&](std::size_t count) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += static_cast<double>(rep.m[i]) * rep.m[i];
    return s / static_cast<double>(count);
  };
  double s1 = 0.0;
  for (int v : rep.m) s1 += v;
  rep.mean = s1 / static_cast<double>(N);
  rep.second_moment = moment2(N);
  rep.second_moment_half = moment2(std::max<std::size_t>(1, N / 2));
  rep.second_moment_change =
      rep.second_moment > 0.0 ? std::fabs(rep.second_moment - rep.second_moment_half) / rep.second_moment : 0.0;

  std::vector<double> lx, ll, ly;
  for (const auto& row : rep.rows) {
    if (row.l >= 1 && row.p > 0.0) {
      lx.push_back(std::log(static_cast<double>(row.l)));
      ll.push_back(static_cast<double>(row.l));
      ly.push_back(std::log(row.p));
    }
  }
  rep.fit_points = ly.size();
  if (rep.fit_points >= 2) {
    const stats::LineFit power = stats::least_squares(lx, ly);
    const stats::LineFit geo = stats::least_squares(ll, ly);
    rep.power_exponent = -power.slope;
    rep.power_sse = power.rss;
    rep.geometric_rate = std::exp(geo.slope);
    rep.geometric_sse = geo.rss;
    rep.geometric_dominates = geo.rss <= power.rss;
    rep.consistent = rep.power_exponent >= 3.0 || rep.geometric_dominates;
  } else {
    rep.consistent = true;
  }
  return rep;
}

SurvivalMReport survival_m(const CircleMap& map, double sigma, const std::vector<std::uint64_t>& seeds,
                           const Arc& I, double kappa, int l_max, int threads, const FullBranchOptions& options) {
  require(seeds.size() >= 1000, "survival_m: at least 1000 seeds required");
  std::vector<int> m(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t s) {
    try {
      m[s] = full_branch_time(map, NoiseStream(sigma, seeds[s]), I, kappa, options).m;
    } catch (const TimeoutError&) {
      m[s] = options.n_max + 1;
    } catch (const BranchExplosion&) {
      m[s] = options.n_max + 1;
    }
  });
  return survival_from_samples(std::move(m), options.n_max, l_max);
}

H4Estimate estimate_h4(const CircleMap& map, double sigma, double eta, double kappa, int K_max,
                       std::size_t seeds, std::size_t arcs, std::uint64_t seed, int threads) {
  require(eta > 0.0 && 4.0 * eta < 1.0, "estimate_h4: 0 < eta < 1/4 required");
  require(K_max >= 1 && seeds >= 1 && arcs >= 1, "estimate_h4: K_max, seeds, arcs >= 1 required");
  H4Estimate est;
  est.eta = eta;
  est.arcs = arcs;
  est.seeds = seeds;
  FullBranchOptions opt;
  opt.n_max = K_max;
  const NoiseStream master(sigma, seed);
  std::vector<int> m(arcs * seeds);
  parallel_for(arcs * seeds, threads, [&](std::size_t idx) {
    const std::size_t a = idx / seeds;
    const double frac = arcs == 1 ? 0.5 : static_cast<double>(a) / static_cast<double>(arcs - 1);
    const double len = eta / 4.0 * std::pow(16.0, frac);
    const double start = std::fmod(0.6180339887498949 * static_cast<double>(a), 1.0);
    try {
      m[idx] = full_branch_time(map, master.split(idx), Arc(start, start + len), kappa, opt).m;
    } catch (const TimeoutError&) {
      m[idx] = K_max + 1;
    } catch (const BranchExplosion&) {
      m[idx] = K_max + 1;
    }
  });
  est.iota_by_K.assign(static_cast<std::size_t>(K_max), 0.0);
  for (int K = 1; K <= K_max; ++K) {
    double worst = 1.0;
    for (std::size_t a = 0; a < arcs; ++a) {
      std::size_t ok = 0;
      for (std::size_t s = 0; s < seeds; ++s) ok += m[a * seeds + s] <= K ? 1 : 0;
      worst = std::min(worst, stats::wilson(ok, seeds).lo);
    }
    est.iota_by_K[static_cast<std::size_t>(K) - 1] = worst;
  }
  const auto best = std::max_element(est.iota_by_K.begin(), est.iota_by_K.end());
  est.K = static_cast<int>(best - est.iota_by_K.begin()) + 1;
  est.iota = *best;
  return est;
}

}  // namespace rhlab
