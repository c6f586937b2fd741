#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rhlab::stats {

struct ProportionInterval {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

ProportionInterval wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> v);

double lag1_autocorrelation(std::span<const double> v);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// One-sample KS against Uniform(lo, hi).
KsResult ks_uniform(std::vector<double> a, double lo, double hi);

// Poisson regression count_i ~ Poisson(exposure_i exp(a + b x_i)) fitted by IRLS.
struct PoissonSlope {
  bool estimable = false;
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  int iterations = 0;
  // slope + z95 * se < 0
  bool negative_95 = false;
};

PoissonSlope poisson_log_slope(std::span<const double> x, std::span<const double> counts,
                               std::span<const double> exposure);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
  std::size_t n = 0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace rhlab::stats
