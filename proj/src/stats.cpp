#include "rhlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rhlab/errors.hpp"

namespace rhlab::stats {

ProportionInterval wilson(std::size_t successes, std::size_t trials, double z) {
  ProportionInterval out;
  if (trials == 0) {
    out.hi = 1.0;
    return out;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  out.p_hat = p;
  out.lo = std::max(0.0, centre - half);
  out.hi = std::min(1.0, centre + half);
  if (successes == 0) out.lo = 0.0;
  if (successes == trials) out.hi = 1.0;
  return out;
}

MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  r.n = v.size();
  if (v.empty()) return r;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  r.mean = mean;
  if (v.size() > 1) {
    r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    r.se = r.sd / std::sqrt(static_cast<double>(v.size()));
  }
  return r;
}

double lag1_autocorrelation(std::span<const double> v) {
  if (v.size() < 3) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    den += (v[i] - mean) * (v[i] - mean);
    if (i + 1 < v.size()) num += (v[i] - mean) * (v[i + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

namespace {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

KsResult ks_uniform(std::vector<double> a, double lo, double hi) {
  require(!a.empty() && hi > lo, "ks_uniform: invalid input");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double cdf = std::clamp((a[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  const double sq = std::sqrt(n);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

PoissonSlope poisson_log_slope(std::span<const double> x, std::span<const double> counts,
                               std::span<const double> exposure) {
  require(x.size() == counts.size() && x.size() == exposure.size(),
          "poisson_log_slope: size mismatch");
  PoissonSlope fit;
  double total = 0.0;
  for (double c : counts) total += c;
  std::vector<double> support;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (counts[i] > 0.0) support.push_back(x[i]);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (total <= 0.0 || support.size() < 2) return fit;

  double total_exposure = 0.0;
  for (double e : exposure) total_exposure += e;
  double a = std::log(total / total_exposure);
  double b = 0.0;
  double info_aa = 0.0, info_ab = 0.0, info_bb = 0.0;
  for (int it = 0; it < 100; ++it) {
    double ga = 0.0, gb = 0.0;
    info_aa = info_ab = info_bb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double mu = exposure[i] * std::exp(a + b * x[i]);
      double r = counts[i] - mu;
      ga += r;
      gb += r * x[i];
      info_aa += mu;
      info_ab += mu * x[i];
      info_bb += mu * x[i] * x[i];
    }
    double det = info_aa * info_bb - info_ab * info_ab;
    if (!(det > 0.0) || !std::isfinite(det)) return fit;
    double da = (info_bb * ga - info_ab * gb) / det;
    double db = (info_aa * gb - info_ab * ga) / det;
    a += da;
    b += db;
    fit.iterations = it + 1;
    if (std::fabs(da) < 1e-12 && std::fabs(db) < 1e-12) break;
  }
  double det = info_aa * info_bb - info_ab * info_ab;
  if (!(det > 0.0) || !std::isfinite(a) || !std::isfinite(b)) return fit;
  fit.estimable = true;
  fit.intercept = a;
  fit.slope = b;
  fit.slope_se = std::sqrt(info_aa / det);
  fit.negative_95 = b + 1.959963984540054 * fit.slope_se < 0.0;
  return fit;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "least_squares: need >= 2 points");
  LineFit f;
  f.n = x.size();
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    f.rss += r * r;
  }
  return f;
}

}  // namespace rhlab::stats
