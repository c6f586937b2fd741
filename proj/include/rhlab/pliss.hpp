#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rhlab/circle.hpp"
#include "rhlab/circle_map.hpp"
#include "rhlab/orbit.hpp"

namespace rhlab {

struct PlissSelection {
  std::vector<std::size_t> indices;  // 1-based
  double gamma = 0.0;
  double c = 0.0;
  double A = 0.0;
  bool hypothesis_violated = false;  // some a_j > A
  bool sum_condition = false;        // sum a_j >= c N
  std::size_t guaranteed = 0;        // ceil(gamma N) when sum_condition holds
};

PlissSelection pliss_select(const std::vector<double>& a, double c, double A);

// Largest admissible b: min{1/2, 1/(2 beta)} (1 - 1e-6).
double default_b(double beta);

struct HyperbolicTimeRecord {
  std::vector<std::size_t> times;
  double kappa1 = 0.0;
  double delta = 0.0;
  double b = 0.0;
};

HyperbolicTimeRecord hyperbolic_times(const Orbit& orbit, double kappa1, double delta, double b);

struct FrequencyBound {
  double lambda = 0.0;
  double A = 0.0;
  double b = 0.0;
  double delta = 0.0;
  double H_delta = 0.0;
  double gamma1 = 0.0;
  double gamma2_printed = 0.0;     // 1 - 8H/lambda
  double gamma2_consistent = 0.0;  // 1 - 8H/(b lambda)
  double gamma2 = 0.0;             // the smaller of the two
  double gamma = 0.0;
  double kappa1 = 0.0;
  bool smallness_holds = false;    // H(delta) < gamma1 b lambda / 8
};

// Largest delta with H(delta) <= target (H increasing on (0, 1/e)).
double delta_for_H(double target);

// delta defaults to the largest value with H(delta) <= gamma1 b lambda / 16.
FrequencyBound make_frequency_bound(double lambda, double A, double b,
                                    std::optional<double> delta = std::nullopt);

struct FrequencyReport {
  bool hypotheses_met = false;
  bool violation = false;
  std::size_t N = 0;
  std::size_t count = 0;
  double required = 0.0;  // gamma N
  double S_N = 0.0;
  double Z_N = 0.0;
  std::string outcome;    // "no claim", "holds", "violated"
};

FrequencyReport frequency_check(const Orbit& orbit, const FrequencyBound& fb, std::size_t N);

std::vector<std::size_t> interval_hyperbolic_times(const Orbit& orbit, const Arc& I, double delta1,
                                                   double kappa1, double delta, double b);

// Orbit computed at `bits` of precision; stored values are rounded to double.
Orbit iterate_orbit_mp(const CircleMap& map, const NoiseStream& noise, double x0, std::size_t n,
                       const std::vector<double>& deltas, long bits);

struct BallCheckReport {
  Interval J;                      // lift coordinates around x
  std::string J_lo_decimal;
  std::string J_hi_decimal;
  double J_length = 0.0;
  double J_length_bound = 0.0;     // 2 delta1 kappa1^(-n/2)
  bool length_ok = false;
  double min_log_deriv = 0.0;
  double log_deriv_bound = 0.0;    // (n/2) log kappa1
  bool derivative_ok = false;
  double image_error = 0.0;        // endpoint mismatch against B(g^n x, delta1)
  bool image_ok = false;
  double containment_margin = 0.0; // min over i of (radius_i - deviation_i) / radius_i
  bool containment_ok = false;
  int precision_bits = 0;
  bool pass() const { return length_ok && derivative_ok && image_ok && containment_ok; }
};

BallCheckReport hyperbolic_ball_check(const CircleMap& map, const std::vector<double>& noise_prefix,
                                      double x, std::size_t n, double delta1, double kappa1,
                                      double image_tolerance = 1e-9);

}  // namespace rhlab
