#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rhlab/circle_map.hpp"
#include "rhlab/dynamics.hpp"
#include "rhlab/noise.hpp"
#include "rhlab/stats.hpp"
#include "rhlab/summation.hpp"

namespace rhlab {

struct Orbit {
  double x0 = 0.0;
  std::vector<double> points;     // x_0 .. x_n
  std::vector<double> noise;      // w_0 .. w_{n-1}
  std::vector<double> log_deriv;  // log|df(x_j + w_j)|, j < n
  std::vector<double> S;          // S_0 .. S_n
  std::vector<double> deltas;
  std::vector<std::vector<double>> dist;  // per delta: truncated distance d_j, j < n
  std::vector<std::vector<double>> Z;     // per delta: Z_0 .. Z_n, Z_i = sum_{j<i} -log d_j
  std::optional<std::size_t> singular_step;
  std::size_t clamp_count = 0;
  std::size_t nondiff_count = 0;

  std::size_t length() const { return noise.size(); }
  bool poisoned_before(std::size_t n) const { return singular_step && *singular_step < n; }
  // Index of delta in `deltas` (exact match); throws PreconditionError if absent.
  std::size_t delta_index(double delta) const;
};

// Incremental orbit iteration with compensated sums and no storage.
class OrbitStepper {
 public:
  OrbitStepper(const CircleMap& map, NoiseStream noise, double x0, std::vector<double> deltas);

  void step();
  std::size_t steps() const { return i_; }
  double x() const { return x_; }
  double S() const { return S_.value(); }
  double Z(std::size_t delta_index) const { return Z_[delta_index].value(); }
  bool poisoned() const { return singular_step_.has_value(); }
  std::optional<std::size_t> singular_step() const { return singular_step_; }
  // Quantities of the most recent step.
  double last_noise() const { return last_w_; }
  double last_log_deriv() const { return last_ld_; }
  double last_dist(std::size_t delta_index) const { return last_d_[delta_index]; }
  bool last_clamped() const { return last_clamped_; }
  bool last_nondiff() const { return last_nondiff_; }

 private:
  const CircleMap* map_;
  NoiseStream noise_;
  std::vector<double> deltas_;
  double x_;
  std::size_t i_ = 0;
  CompensatedSum S_;
  std::vector<CompensatedSum> Z_;
  std::optional<std::size_t> singular_step_;
  double last_w_ = 0.0;
  double last_ld_ = 0.0;
  std::vector<double> last_d_;
  bool last_clamped_ = false;
  bool last_nondiff_ = false;
};

Orbit iterate_orbit(const CircleMap& map, const NoiseStream& noise, CirclePoint x0, std::size_t n,
                    const std::vector<double>& deltas = {});

double finite_time_lyapunov(const Orbit& orbit, std::size_t n);

struct HistogramMeasure {
  int bins = 0;
  std::vector<double> mass;
  double tv_two_start = 0.0;
};

HistogramMeasure stationary_histogram(const CircleMap& map, const NoiseStream& noise, int bins,
                                      std::size_t burn_in, std::size_t samples,
                                      double x0 = 0.1, double x0_alt = 0.6);

struct LyapunovEstimate {
  std::vector<double> per_trial;  // S_n / n, NaN for poisoned trials
  stats::MeanSe summary;
  std::size_t poisoned = 0;
};

// Trial t uses master.split(t).
LyapunovEstimate lyapunov_estimate(const CircleMap& map, const NoiseStream& master,
                                   std::size_t trials, std::size_t n, double x0 = 0.3,
                                   int threads = 1);

double H_of_delta(double delta);

struct TailEvent {
  enum class Kind { SBelow, ZAbove };
  Kind kind = Kind::SBelow;
  double lambda = 0.0;
  double delta = 0.0;
  double H = 0.0;

  static TailEvent s_below(double lambda);
  // H defaults to H(delta) = sqrt(delta) (1 + log(1/delta)).
  static TailEvent z_above(double delta);
  static TailEvent z_above(double delta, double H);
};

struct TailRow {
  std::size_t n = 0;
  std::size_t count = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct SurvivalCurve {
  TailEvent event;
  std::vector<TailRow> rows;
  std::size_t poisoned = 0;
  stats::PoissonSlope fit;
  bool nonincreasing = true;
};

// One orbit per trial (master.split(t)) evaluated against every event.
std::vector<SurvivalCurve> tail_probabilities(const CircleMap& map, const NoiseStream& master,
                                              double x0, const std::vector<TailEvent>& events,
                                              std::vector<std::size_t> n_list, std::size_t trials,
                                              int threads = 1);

SurvivalCurve tail_probability(const CircleMap& map, const NoiseStream& master, double x0,
                               const TailEvent& event, std::vector<std::size_t> n_list,
                               std::size_t trials, int threads = 1);

}  // namespace rhlab
