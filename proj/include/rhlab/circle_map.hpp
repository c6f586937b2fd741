#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rhlab/mp_real.hpp"
#include "json.hpp"

namespace rhlab {

struct Regularity {
  double B = 0.0;
  double beta = 1.0;
};

// A lift F of a circle endomorphism: F(x + 1) = F(x) + degree.
class MapFamily {
 public:
  virtual ~MapFamily() = default;
  virtual std::string name() const = 0;
  virtual double lift(double x) const = 0;
  virtual double deriv(double x) const = 0;
  virtual double deriv2(double x) const = 0;
  virtual bool supports_mp() const { return true; }
  virtual mp::Real lift(const mp::Real& x) const = 0;
  virtual mp::Real deriv(const mp::Real& x) const = 0;
  virtual int degree() const = 0;
  virtual nlohmann::json to_json() const = 0;
  // Points in [0,1) where the derivative vanishes / is undefined.
  virtual std::vector<double> critical_points() const = 0;
  virtual std::vector<double> nondiff_points() const { return {}; }
  // Points in [0,1) where |F'| can attain an interior local minimum besides
  // the critical points (zeros of F'' where F' is nonzero).
  virtual std::vector<double> inflection_points() const = 0;
  virtual double sup_abs_deriv() const = 0;
};

struct TableData {
  std::vector<double> x;
  std::vector<double> f;
  std::vector<double> df;
  std::vector<double> d2f;
  int degree = 0;
};

class CircleMap {
 public:
  CircleMap() = default;
  explicit CircleMap(std::shared_ptr<const MapFamily> family,
                     std::optional<Regularity> regularity = std::nullopt);

  // F(x) = L sin(2 pi x) + a.
  static CircleMap sine(double L, double a = 0.0);
  // F(x) = k x + a.
  static CircleMap linear(int k, double a = 0.0);
  // C^2 quintic Hermite interpolation of tabulated (x, f, df, d2f).
  static CircleMap table(TableData data);
  // User-supplied lift and derivatives (double precision only).
  static CircleMap from_functions(std::function<double(double)> lift,
                                  std::function<double(double)> deriv,
                                  std::function<double(double)> deriv2, int degree,
                                  std::vector<double> nondiff = {});
  static CircleMap from_json(const nlohmann::json& spec);

  const MapFamily& family() const { return *family_; }
  std::string name() const { return family_->name(); }

  double lift(double x) const { return family_->lift(x); }
  double deriv(double x) const { return family_->deriv(x); }
  double deriv2(double x) const { return family_->deriv2(x); }
  mp::Real lift(const mp::Real& x) const { return family_->lift(x); }
  mp::Real deriv(const mp::Real& x) const { return family_->deriv(x); }
  bool supports_mp() const { return family_->supports_mp(); }
  int degree() const { return family_->degree(); }

  const std::vector<double>& critical_set() const { return critical_; }
  const std::vector<double>& nondiff_set() const { return nondiff_; }
  const std::vector<double>& singular_set() const { return singular_; }
  const std::vector<double>& inflection_set() const { return inflection_; }

  double sup_abs_deriv() const { return sup_abs_deriv_; }
  double sup_log_deriv() const;
  Regularity regularity() const;
  bool has_regularity() const { return regularity_.has_value(); }
  CircleMap with_regularity(Regularity r) const;

  // min/max of |F'| over the lift interval [lo, hi].
  double min_abs_deriv(double lo, double hi) const;
  double max_abs_deriv(double lo, double hi) const;

  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const MapFamily> family_;
  std::optional<Regularity> regularity_;
  std::vector<double> critical_;
  std::vector<double> nondiff_;
  std::vector<double> singular_;
  std::vector<double> inflection_;
  double sup_abs_deriv_ = 0.0;
};

// Integer translates of the points of `set` lying in the open interval (lo, hi).
std::vector<double> translates_in(std::span<const double> set, double lo, double hi);

}  // namespace rhlab
