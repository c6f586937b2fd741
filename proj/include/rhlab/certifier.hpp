#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rhlab/circle.hpp"
#include "rhlab/circle_map.hpp"

namespace rhlab {

inline constexpr double kCriticalModelRadius = 1e-4;

struct CriticalFit {
  double point = 0.0;
  double kappa = 0.0;  // |F''| at the critical point
  double ratio_lo = 0.0;
  double ratio_hi = 0.0;
};

struct ContractingIntegral {
  double V = 0.0;  // -int_C log|df| >= 0
  std::vector<Arc> components;
  std::vector<CriticalFit> fits;
  double error_estimate = 0.0;
};

ContractingIntegral contracting_log_integral_detail(const CircleMap& map);
double contracting_log_integral(const CircleMap& map);

struct CertifyOptions {
  double gamma_margin = 0.01;
  std::size_t access_grid = 256;
  std::size_t access_trials = 10000;
  std::uint64_t access_seed = 0x5EEDULL;
  bool compute_access = true;
};

struct PredominanceReport {
  double R = 0.0;
  double sigma = 0.0;
  std::vector<Arc> components;
  double D_R = 1.0;
  double V = 0.0;
  std::array<bool, 3> check_items{false, false, false};
  double item1_min_component = 0.0;  // smallest |G_i| (compare with 1/R)
  bool nondegenerate = false;
  double item2_margin = 0.0;         // -V/log R + 2/R + D(R)
  double item3_margin = 0.0;         // sigma - 1/R - D(R)
  Interval h_window;
  bool h_window_empty = true;
  double h = 0.0;
  double Z_h = 0.0;
  double alpha = 0.0;
  double Zbar_h = 0.0;
  std::optional<Arc> delta_arc;
  double q_access = 0.0;
  bool pass = false;
  std::vector<std::string> notes;
};

PredominanceReport certify(const CircleMap& map, double sigma, double R,
                           const CertifyOptions& options = {});

struct AdmissibleH {
  Interval window;
  bool empty = true;
  double midpoint = 0.0;
};

AdmissibleH admissible_h(double D_R, double V, double sigma, double R);
AdmissibleH admissible_h(const PredominanceReport& report);

// Delta = [c - 1/(2R), c + 1/(2R)] around the midpoint of the largest component of {|df| > R}.
Arc delta_reference(const CircleMap& map, double R);

double accessibility_probability(const CircleMap& map, double sigma, double R, double gamma_margin,
                                 std::size_t trials, std::size_t grid = 256,
                                 std::uint64_t seed = 0x5EEDULL);

double c1_constant();

struct SineCertification {
  double L = 0.0;
  double sigma = 0.0;
  double R = 0.0;
  double c1 = 0.0;
  double threshold = 0.0;  // 1/R + c1 R / (pi^2 L)
  bool closed_form_pass = false;
  bool quadrature_pass = false;
  bool agree = false;
  bool within_band = false;  // |sigma - threshold| < 1e-3
  PredominanceReport report;
  std::string note;
};

SineCertification certify_sine_family(double L, double sigma, const CertifyOptions& options = {});

}  // namespace rhlab
