#pragma once

#include <vector>

#include "rhlab/circle.hpp"
#include "rhlab/circle_map.hpp"

namespace rhlab {

inline constexpr double kCriticalTolerance = 1e-13;
inline constexpr double kDistanceFloor = 1e-15;
inline constexpr double kRootTolerance = 1e-12;

enum class DerivativeStatus { Regular, Critical, NonDifferentiable };

struct LogDerivative {
  double value = 0.0;  // -inf when Critical
  DerivativeStatus status = DerivativeStatus::Regular;
};

struct TruncatedDistance {
  double value = 1.0;
  bool clamped = false;
};

CirclePoint eval_map(const CircleMap& map, CirclePoint x, double w);
LogDerivative log_abs_derivative(const CircleMap& map, CirclePoint x, double w);
TruncatedDistance truncated_distance(const CircleMap& map, CirclePoint x, double w, double delta);

// Components of {|F'| > level} (above = true) or {|F'| < level} on one period,
// merged across the 0/1 seam.
std::vector<Arc> level_components(const CircleMap& map, double level, bool above);

struct ExpandingRegion {
  std::vector<Arc> components;
  double D = 1.0;
};

ExpandingRegion expanding_components(const CircleMap& map, double R);

struct RegularityReport {
  bool pass = true;
  double B = 0.0;
  double beta = 0.0;
  double lower_bound_margin = 0.0;   // min over grid of log|F'| - log(dist^beta / B)
  double lower_bound_witness = 0.0;
  double holder_margin = 0.0;        // min over pairs of B dist(x,y)/dist^beta - |dlog|
  double holder_witness_x = 0.0;
  double holder_witness_y = 0.0;
};

RegularityReport regularity_check(const CircleMap& map, std::size_t grid_size);

}  // namespace rhlab
