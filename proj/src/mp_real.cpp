#include "rhlab/mp_real.hpp"

#include <cmath>
#include <utility>

#include "rhlab/errors.hpp"

namespace rhlab::mp {

namespace {
thread_local mpfr_prec_t g_precision = 128;
}

mpfr_prec_t precision() { return g_precision; }

PrecisionScope::PrecisionScope(long bits) : saved_(g_precision) {
  if (bits < MPFR_PREC_MIN || bits > 1L << 20) {
    throw PreconditionError("multiprecision: precision out of range");
  }
  g_precision = static_cast<mpfr_prec_t>(bits);
}

PrecisionScope::~PrecisionScope() { g_precision = saved_; }

Real::Real() {
  mpfr_init2(value_, g_precision);
  mpfr_set_zero(value_, 1);
}

Real::Real(double v) {
  mpfr_init2(value_, g_precision);
  mpfr_set_d(value_, v, MPFR_RNDN);
}

Real::Real(const Real& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::from_string(const std::string& text) {
  Real r;
  if (mpfr_set_str(r.value_, text.c_str(), 10, MPFR_RNDN) != 0) {
    throw PreconditionError("multiprecision: cannot parse '" + text + "'");
  }
  return r;
}

Real Real::pi() {
  Real r;
  mpfr_const_pi(r.value_, MPFR_RNDN);
  return r;
}

double Real::to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
double Real::to_double_down() const { return mpfr_get_d(value_, MPFR_RNDD); }
double Real::to_double_up() const { return mpfr_get_d(value_, MPFR_RNDU); }

std::string Real::to_string(int digits) const {
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Rg", digits, value_);
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

long Real::floor_long() const { return mpfr_get_si(value_, MPFR_RNDD); }

Real& Real::operator+=(const Real& o) {
  mpfr_add(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  mpfr_sub(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  mpfr_mul(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  mpfr_div(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}

Real operator-(const Real& a) {
  Real r(a);
  mpfr_neg(r.value_, r.value_, MPFR_RNDN);
  return r;
}

#define RHLAB_MP_UNARY(name, fn)                 \
  Real name(const Real& x) {                     \
    Real r;                                      \
    fn(r.raw(), x.raw(), MPFR_RNDN);             \
    return r;                                    \
  }

RHLAB_MP_UNARY(sin, mpfr_sin)
RHLAB_MP_UNARY(cos, mpfr_cos)
RHLAB_MP_UNARY(log, mpfr_log)
RHLAB_MP_UNARY(exp, mpfr_exp)
RHLAB_MP_UNARY(sqrt, mpfr_sqrt)
RHLAB_MP_UNARY(asin, mpfr_asin)
RHLAB_MP_UNARY(abs, mpfr_abs)

#undef RHLAB_MP_UNARY

Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.raw(), x.raw());
  return r;
}

}  // namespace rhlab::mp
