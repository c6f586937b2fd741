#include "rhlab/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rhlab/errors.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

std::size_t Orbit::delta_index(double delta) const {
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (deltas[k] == delta) return k;
  }
  throw PreconditionError("orbit carries no Z data for the requested delta");
}

OrbitStepper::OrbitStepper(const CircleMap& map, NoiseStream noise, double x0,
                           std::vector<double> deltas)
    : map_(&map),
      noise_(noise),
      deltas_(std::move(deltas)),
      x_(CirclePoint(x0).value()),
      Z_(deltas_.size()),
      last_d_(deltas_.size(), 1.0) {
  for (double d : deltas_) require(d > 0.0 && d < 0.5, "orbit: delta must lie in (0, 1/2)");
}

void OrbitStepper::step() {
  const double w = noise_[i_];
  const LogDerivative ld = log_abs_derivative(*map_, x_, w);
  last_w_ = w;
  last_ld_ = ld.value;
  last_nondiff_ = ld.status == DerivativeStatus::NonDifferentiable;
  if (ld.status == DerivativeStatus::Critical && !singular_step_) singular_step_ = i_;
  S_.add(ld.value);
  last_clamped_ = false;
  for (std::size_t k = 0; k < deltas_.size(); ++k) {
    TruncatedDistance td = truncated_distance(*map_, x_, w, deltas_[k]);
    last_d_[k] = td.value;
    last_clamped_ = last_clamped_ || td.clamped;
    Z_[k].add(-std::log(td.value));
  }
  x_ = eval_map(*map_, x_, w).value();
  ++i_;
}

Orbit iterate_orbit(const CircleMap& map, const NoiseStream& noise, CirclePoint x0, std::size_t n,
                    const std::vector<double>& deltas) {
  require(n >= 1, "iterate_orbit: n >= 1 required");
  Orbit o;
  o.x0 = x0.value();
  o.deltas = deltas;
  o.points.reserve(n + 1);
  o.noise.reserve(n);
  o.log_deriv.reserve(n);
  o.S.reserve(n + 1);
  o.dist.assign(deltas.size(), {});
  o.Z.assign(deltas.size(), {});
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    o.dist[k].reserve(n);
    o.Z[k].reserve(n + 1);
    o.Z[k].push_back(0.0);
  }
  OrbitStepper stepper(map, noise, x0.value(), deltas);
  o.points.push_back(stepper.x());
  o.S.push_back(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    stepper.step();
    o.points.push_back(stepper.x());
    o.noise.push_back(stepper.last_noise());
    o.log_deriv.push_back(stepper.last_log_deriv());
    o.S.push_back(stepper.S());
    if (stepper.last_clamped()) ++o.clamp_count;
    if (stepper.last_nondiff()) ++o.nondiff_count;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      o.dist[k].push_back(stepper.last_dist(k));
      o.Z[k].push_back(stepper.Z(k));
    }
  }
  o.singular_step = stepper.singular_step();
  return o;
}

double finite_time_lyapunov(const Orbit& orbit, std::size_t n) {
  require(n >= 1 && n <= orbit.length(), "finite_time_lyapunov: 1 <= n <= orbit length required");
  if (orbit.poisoned_before(n)) throw SingularHit("finite_time_lyapunov: orbit hit the critical set");
  return orbit.S[n] / static_cast<double>(n);
}

HistogramMeasure stationary_histogram(const CircleMap& map, const NoiseStream& noise, int bins,
                                      std::size_t burn_in, std::size_t samples, double x0,
                                      double x0_alt) {
  require(bins >= 16, "stationary_histogram: bins >= 16 required");
  require(samples >= 10000, "stationary_histogram: samples >= 1e4 required");
  auto run = [&](double start) {
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    double x = CirclePoint(start).value();
    for (std::size_t i = 0; i < burn_in + samples; ++i) {
      if (i >= burn_in) {
        auto b = static_cast<std::size_t>(x * bins);
        counts[std::min<std::size_t>(b, static_cast<std::size_t>(bins) - 1)] += 1.0;
      }
      x = eval_map(map, x, noise[i]).value();
    }
    for (double& c : counts) c /= static_cast<double>(samples);
    return counts;
  };
  HistogramMeasure h;
  h.bins = bins;
  h.mass = run(x0);
  std::vector<double> other = run(x0_alt);
  double tv = 0.0;
  for (int b = 0; b < bins; ++b) tv += std::fabs(h.mass[b] - other[b]);
  h.tv_two_start = 0.5 * tv;
  return h;
}

LyapunovEstimate lyapunov_estimate(const CircleMap& map, const NoiseStream& master,
                                   std::size_t trials, std::size_t n, double x0, int threads) {
  require(trials >= 1 && n >= 1, "lyapunov_estimate: trials, n >= 1 required");
  LyapunovEstimate est;
  est.per_trial.assign(trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(trials, threads, [&](std::size_t t) {
    OrbitStepper s(map, master.split(t), x0, {});
    for (std::size_t i = 0; i < n && !s.poisoned(); ++i) s.step();
    if (!s.poisoned()) est.per_trial[t] = s.S() / static_cast<double>(n);
  });
  std::vector<double> ok;
  for (double v : est.per_trial) {
    if (std::isnan(v)) {
      ++est.poisoned;
    } else {
      ok.push_back(v);
    }
  }
  est.summary = stats::mean_se(ok);
  return est;
}

double H_of_delta(double delta) {
  require(delta > 0.0 && delta < 1.0, "H(delta): delta must lie in (0, 1)");
  return std::sqrt(delta) * (1.0 + std::log(1.0 / delta));
}

TailEvent TailEvent::s_below(double lambda) {
  TailEvent e;
  e.kind = Kind::SBelow;
  e.lambda = lambda;
  return e;
}

TailEvent TailEvent::z_above(double delta) { return z_above(delta, H_of_delta(delta)); }

TailEvent TailEvent::z_above(double delta, double H) {
  require(delta > 0.0 && delta < 0.5, "tail event: delta must lie in (0, 1/2)");
  TailEvent e;
  e.kind = Kind::ZAbove;
  e.delta = delta;
  e.H = H;
  return e;
}

std::vector<SurvivalCurve> tail_probabilities(const CircleMap& map, const NoiseStream& master,
                                              double x0, const std::vector<TailEvent>& events,
                                              std::vector<std::size_t> n_list, std::size_t trials,
                                              int threads) {
  require(trials >= 1000, "tail_probability: trials >= 1e3 required");
  require(!n_list.empty(), "tail_probability: n_list must be nonempty");
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  require(n_list.front() >= 1, "tail_probability: n >= 1 required");

  std::vector<double> deltas;
  std::vector<std::size_t> event_delta(events.size(), 0);
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (events[e].kind != TailEvent::Kind::ZAbove) continue;
    auto it = std::find(deltas.begin(), deltas.end(), events[e].delta);
    if (it == deltas.end()) {
      deltas.push_back(events[e].delta);
      it = deltas.end() - 1;
    }
    event_delta[e] = static_cast<std::size_t>(it - deltas.begin());
  }

  const std::size_t ne = events.size();
  const std::size_t nn = n_list.size();
  // hits[t][e * nn + k]; poisoned trials are flagged separately.
  std::vector<std::vector<char>> hits(trials);
  std::vector<char> poisoned(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    std::vector<char> h(ne * nn, 0);
    OrbitStepper s(map, master.split(t), x0, deltas);
    std::size_t k = 0;
    while (k < nn) {
      while (s.steps() < n_list[k]) s.step();
      if (s.poisoned()) {
        poisoned[t] = 1;
        break;
      }
      const double n = static_cast<double>(n_list[k]);
      for (std::size_t e = 0; e < ne; ++e) {
        const TailEvent& ev = events[e];
        bool hit = ev.kind == TailEvent::Kind::SBelow ? s.S() < ev.lambda * n
                                                      : s.Z(event_delta[e]) > ev.H * n;
        h[e * nn + k] = hit ? 1 : 0;
      }
      ++k;
    }
    hits[t] = std::move(h);
  });

  std::size_t n_poisoned = 0;
  for (char p : poisoned) n_poisoned += p ? 1 : 0;
  const std::size_t used = trials - n_poisoned;

  std::vector<SurvivalCurve> curves(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    SurvivalCurve& c = curves[e];
    c.event = events[e];
    c.poisoned = n_poisoned;
    std::vector<double> xs, counts, exposure;
    for (std::size_t k = 0; k < nn; ++k) {
      std::size_t count = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        if (!poisoned[t] && hits[t][e * nn + k]) ++count;
      }
      TailRow row;
      row.n = n_list[k];
      row.count = count;
      row.trials = used;
      auto ci = stats::wilson(count, used);
      row.p_hat = ci.p_hat;
      row.ci_lo = ci.lo;
      row.ci_hi = ci.hi;
      if (!c.rows.empty() && row.p_hat > c.rows.back().p_hat) c.nonincreasing = false;
      c.rows.push_back(row);
      xs.push_back(static_cast<double>(row.n));
      counts.push_back(static_cast<double>(count));
      exposure.push_back(static_cast<double>(used));
    }
    c.fit = stats::poisson_log_slope(xs, counts, exposure);
  }
  return curves;
}

SurvivalCurve tail_probability(const CircleMap& map, const NoiseStream& master, double x0,
                               const TailEvent& event, std::vector<std::size_t> n_list,
                               std::size_t trials, int threads) {
  return tail_probabilities(map, master, x0, {event}, std::move(n_list), trials, threads).front();
}

}  // namespace rhlab
