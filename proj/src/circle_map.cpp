#include "rhlab/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rhlab/circle.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/roots.hpp"

namespace rhlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kScanPoints = 1 << 14;

// Zeros of g on one period, located by a sign scan plus bisection.
std::vector<double> scan_zeros(const std::function<double(double)>& g) {
  std::vector<double> zeros;
  double prev_x = 0.0;
  double prev_g = g(0.0);
  if (prev_g == 0.0) zeros.push_back(0.0);
  for (int k = 1; k <= kScanPoints; ++k) {
    double x = static_cast<double>(k) / kScanPoints;
    double gx = g(x);
    if (gx == 0.0) {
      if (k < kScanPoints) zeros.push_back(x);
    } else if (prev_g != 0.0 && (gx > 0.0) != (prev_g > 0.0)) {
      zeros.push_back(wrap01(bisect_root(g, prev_x, x, 1e-13)));
    }
    prev_x = x;
    prev_g = gx;
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end()), zeros.end());
  return zeros;
}

double scan_sup_abs(const std::function<double(double)>& g) {
  double best = 0.0;
  for (int k = 0; k < 4 * kScanPoints; ++k) {
    best = std::max(best, std::fabs(g(static_cast<double>(k) / (4 * kScanPoints))));
  }
  return best * (1.0 + 1e-6);
}

template <class T>
T two_pi_times(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return kTwoPi * x;
  } else {
    return T::pi() * T(2.0) * x;
  }
}

class SineFamily final : public MapFamily {
 public:
  SineFamily(double L, double a, bool shifted) : L_(L), a_(a), shifted_(shifted) {
    require(std::isfinite(L) && L != 0.0, "sine family: L must be finite and nonzero");
    require(std::isfinite(a), "sine family: shift must be finite");
  }
  std::string name() const override { return shifted_ ? "sine_shifted" : "sine"; }
  double lift(double x) const override { return L_ * std::sin(kTwoPi * x) + a_; }
  double deriv(double x) const override { return kTwoPi * L_ * std::cos(kTwoPi * x); }
  double deriv2(double x) const override {
    return -kTwoPi * kTwoPi * L_ * std::sin(kTwoPi * x);
  }
  mp::Real lift(const mp::Real& x) const override {
    return mp::Real(L_) * mp::sin(two_pi_times(x)) + mp::Real(a_);
  }
  mp::Real deriv(const mp::Real& x) const override {
    return two_pi_times(mp::Real(L_)) * mp::cos(two_pi_times(x));
  }
  int degree() const override { return 0; }
  nlohmann::json to_json() const override {
    return {{"family", name()}, {"L", L_}, {"a", a_}};
  }
  std::vector<double> critical_points() const override { return {0.25, 0.75}; }
  std::vector<double> inflection_points() const override { return {0.0, 0.5}; }
  double sup_abs_deriv() const override { return kTwoPi * std::fabs(L_); }

 private:
  double L_;
  double a_;
  bool shifted_;
};

class LinearFamily final : public MapFamily {
 public:
  LinearFamily(int k, double a) : k_(k), a_(a) {
    require(k != 0, "linear family: degree must be nonzero");
    require(std::isfinite(a), "linear family: shift must be finite");
  }
  std::string name() const override { return "linear"; }
  double lift(double x) const override { return k_ * x + a_; }
  double deriv(double) const override { return k_; }
  double deriv2(double) const override { return 0.0; }
  mp::Real lift(const mp::Real& x) const override {
    return mp::Real(static_cast<double>(k_)) * x + mp::Real(a_);
  }
  mp::Real deriv(const mp::Real&) const override { return mp::Real(static_cast<double>(k_)); }
  int degree() const override { return k_; }
  nlohmann::json to_json() const override {
    return {{"family", "linear"}, {"k", k_}, {"a", a_}};
  }
  std::vector<double> critical_points() const override { return {}; }
  std::vector<double> inflection_points() const override { return {}; }
  double sup_abs_deriv() const override { return std::abs(k_); }

 private:
  int k_;
  double a_;
};

// Quintic Hermite basis on [0,1] and its first two derivatives.
template <class T>
void hermite5(const T& t, T h[6], T dh[6], T d2h[6]) {
  T t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  h[0] = T(1.0) - T(10.0) * t3 + T(15.0) * t4 - T(6.0) * t5;
  h[1] = t - T(6.0) * t3 + T(8.0) * t4 - T(3.0) * t5;
  h[2] = T(0.5) * t2 - T(1.5) * t3 + T(1.5) * t4 - T(0.5) * t5;
  h[3] = T(0.5) * t3 - t4 + T(0.5) * t5;
  h[4] = T(-4.0) * t3 + T(7.0) * t4 - T(3.0) * t5;
  h[5] = T(10.0) * t3 - T(15.0) * t4 + T(6.0) * t5;
  dh[0] = T(-30.0) * t2 + T(60.0) * t3 - T(30.0) * t4;
  dh[1] = T(1.0) - T(18.0) * t2 + T(32.0) * t3 - T(15.0) * t4;
  dh[2] = t - T(4.5) * t2 + T(6.0) * t3 - T(2.5) * t4;
  dh[3] = T(1.5) * t2 - T(4.0) * t3 + T(2.5) * t4;
  dh[4] = T(-12.0) * t2 + T(28.0) * t3 - T(15.0) * t4;
  dh[5] = -dh[0];
  d2h[0] = T(-60.0) * t + T(180.0) * t2 - T(120.0) * t3;
  d2h[1] = T(-36.0) * t + T(96.0) * t2 - T(60.0) * t3;
  d2h[2] = T(1.0) - T(9.0) * t + T(18.0) * t2 - T(10.0) * t3;
  d2h[3] = T(3.0) * t - T(12.0) * t2 + T(10.0) * t3;
  d2h[4] = T(-24.0) * t + T(84.0) * t2 - T(60.0) * t3;
  d2h[5] = -d2h[0];
}

class TableFamily final : public MapFamily {
 public:
  explicit TableFamily(TableData d) : d_(std::move(d)) {
    std::size_t n = d_.x.size();
    require(n >= 4, "table map: at least 4 nodes required");
    require(d_.f.size() == n && d_.df.size() == n && d_.d2f.size() == n,
            "table map: x, f, df, d2f must have equal length");
    for (std::size_t i = 0; i < n; ++i) {
      require(d_.x[i] >= 0.0 && d_.x[i] < 1.0, "table map: nodes must lie in [0,1)");
      if (i > 0) require(d_.x[i] > d_.x[i - 1], "table map: nodes must be increasing");
    }
  }
  std::string name() const override { return "table"; }
  double lift(double x) const override { return eval<double>(x, 0); }
  double deriv(double x) const override { return eval<double>(x, 1); }
  double deriv2(double x) const override { return eval<double>(x, 2); }
  mp::Real lift(const mp::Real& x) const override { return eval<mp::Real>(x, 0); }
  mp::Real deriv(const mp::Real& x) const override { return eval<mp::Real>(x, 1); }
  int degree() const override { return d_.degree; }
  nlohmann::json to_json() const override {
    return {{"family", "table"}, {"x", d_.x},   {"f", d_.f},
            {"df", d_.df},       {"d2f", d_.d2f}, {"degree", d_.degree}};
  }
  std::vector<double> critical_points() const override {
    return scan_zeros([this](double x) { return deriv(x); });
  }
  std::vector<double> inflection_points() const override {
    return scan_zeros([this](double x) { return deriv2(x); });
  }
  double sup_abs_deriv() const override {
    return scan_sup_abs([this](double x) { return deriv(x); });
  }

 private:
  template <class T>
  T eval(const T& x, int order) const {
    using std::floor;
    using mp::floor;
    T period = floor(x);
    T u = x - period;
    double ud = 0.0;
    long shift = 0;
    if constexpr (std::is_same_v<T, double>) {
      ud = u;
      shift = static_cast<long>(period);
    } else {
      ud = u.to_double();
      shift = period.floor_long();
    }
    const std::size_t n = d_.x.size();
    auto it = std::upper_bound(d_.x.begin(), d_.x.end(), ud);
    double x0, x1, f0, f1;
    std::size_t i0, i1;
    if (it == d_.x.begin()) {
      i0 = n - 1;
      i1 = 0;
      x0 = d_.x[i0] - 1.0;
      x1 = d_.x[0];
      f0 = d_.f[i0] - d_.degree;
      f1 = d_.f[0];
    } else if (it == d_.x.end()) {
      i0 = n - 1;
      i1 = 0;
      x0 = d_.x[i0];
      x1 = d_.x[0] + 1.0;
      f0 = d_.f[i0];
      f1 = d_.f[0] + d_.degree;
    } else {
      i1 = static_cast<std::size_t>(it - d_.x.begin());
      i0 = i1 - 1;
      x0 = d_.x[i0];
      x1 = d_.x[i1];
      f0 = d_.f[i0];
      f1 = d_.f[i1];
    }
    const double h = x1 - x0;
    T t = (u - T(x0)) / T(h);
    T b[6], db[6], d2b[6];
    hermite5(t, b, db, d2b);
    const double c[6] = {f0, h * d_.df[i0], h * h * d_.d2f[i0], h * h * d_.d2f[i1], h * d_.df[i1], f1};
    T acc(0.0);
    const T* basis = order == 0 ? b : (order == 1 ? db : d2b);
    for (int k = 0; k < 6; ++k) acc += T(c[k]) * basis[k];
    if (order == 0) return acc + T(static_cast<double>(shift) * d_.degree);
    if (order == 1) return acc / T(h);
    return acc / T(h * h);
  }

  TableData d_;
};

class FunctionFamily final : public MapFamily {
 public:
  FunctionFamily(std::function<double(double)> lift, std::function<double(double)> deriv,
                 std::function<double(double)> deriv2, int degree, std::vector<double> nondiff)
      : lift_(std::move(lift)),
        deriv_(std::move(deriv)),
        deriv2_(std::move(deriv2)),
        degree_(degree),
        nondiff_(std::move(nondiff)) {
    require(lift_ && deriv_ && deriv2_, "function map: lift and derivatives are required");
    for (double& p : nondiff_) p = wrap01(p);
  }
  std::string name() const override { return "custom"; }
  double lift(double x) const override { return lift_(x); }
  double deriv(double x) const override { return deriv_(x); }
  double deriv2(double x) const override { return deriv2_(x); }
  bool supports_mp() const override { return false; }
  mp::Real lift(const mp::Real&) const override {
    throw PreconditionError("function map: multiprecision evaluation unavailable");
  }
  mp::Real deriv(const mp::Real&) const override {
    throw PreconditionError("function map: multiprecision evaluation unavailable");
  }
  int degree() const override { return degree_; }
  nlohmann::json to_json() const override { return {{"family", "custom"}, {"degree", degree_}}; }
  std::vector<double> critical_points() const override { return scan_zeros(deriv_); }
  std::vector<double> nondiff_points() const override { return nondiff_; }
  std::vector<double> inflection_points() const override { return scan_zeros(deriv2_); }
  double sup_abs_deriv() const override { return scan_sup_abs(deriv_); }

 private:
  std::function<double(double)> lift_, deriv_, deriv2_;
  int degree_;
  std::vector<double> nondiff_;
};

}  // namespace

std::vector<double> translates_in(std::span<const double> set, double lo, double hi) {
  std::vector<double> out;
  if (set.empty() || !(hi > lo)) return out;
  const double k_lo = std::floor(lo) - 1.0;
  const double k_hi = std::floor(hi) + 1.0;
  for (double k = k_lo; k <= k_hi; k += 1.0) {
    for (double s : set) {
      double p = s + k;
      if (p > lo && p < hi) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CircleMap::CircleMap(std::shared_ptr<const MapFamily> family, std::optional<Regularity> regularity)
    : family_(std::move(family)), regularity_(regularity) {
  require(family_ != nullptr, "CircleMap: family required");
  if (regularity_) {
    require(regularity_->B > 1.0, "regularity: B > 1 required");
    require(regularity_->beta > 0.0, "regularity: beta > 0 required");
  }
  critical_ = family_->critical_points();
  nondiff_ = family_->nondiff_points();
  inflection_ = family_->inflection_points();
  std::sort(critical_.begin(), critical_.end());
  std::sort(nondiff_.begin(), nondiff_.end());
  singular_ = critical_;
  singular_.insert(singular_.end(), nondiff_.begin(), nondiff_.end());
  std::sort(singular_.begin(), singular_.end());
  singular_.erase(std::unique(singular_.begin(), singular_.end()), singular_.end());
  sup_abs_deriv_ = family_->sup_abs_deriv();
}

CircleMap CircleMap::sine(double L, double a) {
  return CircleMap(std::make_shared<SineFamily>(L, a, a != 0.0));
}

CircleMap CircleMap::linear(int k, double a) {
  return CircleMap(std::make_shared<LinearFamily>(k, a));
}

CircleMap CircleMap::table(TableData data) {
  return CircleMap(std::make_shared<TableFamily>(std::move(data)));
}

CircleMap CircleMap::from_functions(std::function<double(double)> lift,
                                    std::function<double(double)> deriv,
                                    std::function<double(double)> deriv2, int degree,
                                    std::vector<double> nondiff) {
  return CircleMap(std::make_shared<FunctionFamily>(std::move(lift), std::move(deriv),
                                                    std::move(deriv2), degree, std::move(nondiff)));
}

CircleMap CircleMap::from_json(const nlohmann::json& spec) {
  require(spec.is_object(), "map spec: JSON object expected");
  require(spec.contains("family"), "map spec: missing 'family'");
  const std::string family = spec.at("family").get<std::string>();
  CircleMap map;
  try {
    if (family == "sine" || family == "sine_shifted") {
      require(spec.contains("L"), "map spec: missing 'L'");
      double a = spec.value("a", 0.0);
      map = CircleMap(std::make_shared<SineFamily>(spec.at("L").get<double>(), a,
                                                   family == "sine_shifted"));
    } else if (family == "linear") {
      require(spec.contains("k"), "map spec: missing 'k'");
      map = linear(spec.at("k").get<int>(), spec.value("a", 0.0));
    } else if (family == "table") {
      TableData d;
      d.x = spec.at("x").get<std::vector<double>>();
      d.f = spec.at("f").get<std::vector<double>>();
      d.df = spec.at("df").get<std::vector<double>>();
      d.d2f = spec.at("d2f").get<std::vector<double>>();
      d.degree = spec.value("degree", 0);
      map = table(std::move(d));
    } else {
      throw PreconditionError("map spec: unknown family '" + family + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("map spec: ") + e.what());
  }
  if (spec.contains("regularity")) {
    const auto& r = spec.at("regularity");
    map = map.with_regularity({r.at("B").get<double>(), r.at("beta").get<double>()});
  }
  return map;
}

double CircleMap::sup_log_deriv() const { return std::log(sup_abs_deriv_); }

Regularity CircleMap::regularity() const {
  if (regularity_) return *regularity_;
  double kappa = 0.0;
  for (double c : critical_) kappa = std::max(kappa, std::fabs(deriv2(c)));
  double B = std::max({2.0, kappa, sup_abs_deriv_});
  return {B, 1.0};
}

CircleMap CircleMap::with_regularity(Regularity r) const {
  require(r.B > 1.0, "regularity: B > 1 required");
  require(r.beta > 0.0, "regularity: beta > 0 required");
  CircleMap copy = *this;
  copy.regularity_ = r;
  return copy;
}

double CircleMap::min_abs_deriv(double lo, double hi) const {
  double m = std::min(std::fabs(deriv(lo)), std::fabs(deriv(hi)));
  if (!translates_in(critical_, lo, hi).empty()) return 0.0;
  for (double p : translates_in(inflection_, lo, hi)) m = std::min(m, std::fabs(deriv(p)));
  for (double p : translates_in(nondiff_, lo, hi)) {
    m = std::min({m, std::fabs(deriv(std::nextafter(p, -INFINITY))),
                  std::fabs(deriv(std::nextafter(p, INFINITY)))});
  }
  return m;
}

double CircleMap::max_abs_deriv(double lo, double hi) const {
  double m = std::max(std::fabs(deriv(lo)), std::fabs(deriv(hi)));
  for (double p : translates_in(inflection_, lo, hi)) m = std::max(m, std::fabs(deriv(p)));
  for (double p : translates_in(nondiff_, lo, hi)) {
    m = std::max({m, std::fabs(deriv(std::nextafter(p, -INFINITY))),
                  std::fabs(deriv(std::nextafter(p, INFINITY)))});
  }
  return m;
}

nlohmann::json CircleMap::to_json() const {
  nlohmann::json j = family_->to_json();
  if (regularity_) j["regularity"] = {{"B", regularity_->B}, {"beta", regularity_->beta}};
  return j;
}

}  // namespace rhlab
