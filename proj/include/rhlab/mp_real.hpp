#pragma once

#include <mpfr.h>

#include <string>

// Thin RAII wrapper over MPFR with a per-thread working precision.
namespace rhlab::mp {

mpfr_prec_t precision();

class PrecisionScope {
 public:
  explicit PrecisionScope(long bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real();
  Real(double v);  // NOLINT(google-explicit-constructor)
  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  static Real from_string(const std::string& text);
  static Real pi();

  double to_double() const;
  double to_double_down() const;
  double to_double_up() const;
  std::string to_string(int digits = 40) const;
  long floor_long() const;

  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }
  friend Real operator-(const Real& a);

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.value_, b.value_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.value_, b.value_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.value_, b.value_) != 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

 private:
  mpfr_t value_;
};

Real sin(const Real& x);
Real cos(const Real& x);
Real log(const Real& x);
Real exp(const Real& x);
Real sqrt(const Real& x);
Real asin(const Real& x);
Real abs(const Real& x);
Real floor(const Real& x);

}  // namespace rhlab::mp
