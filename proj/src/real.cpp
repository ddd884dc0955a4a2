#include "cmtrace/real.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmtrace {

namespace {

// Raise the precision of `x` (keeping its value) so the result of an
// operation with an operand of precision `p` is computed at max precision.
void widen(mpfr_ptr x, prec_t p) {
  if (mpfr_get_prec(x) < p) mpfr_prec_round(x, p, MPFR_RNDN);
}

template <class F>
Real unary(const Real& x, F f) {
  Real r(x.prec());
  f(r.get(), x.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real::Real(std::string_view text, prec_t prec) {
  mpfr_init2(v_, prec);
  const std::string s(text);
  char* end = nullptr;
  if (mpfr_strtofr(v_, s.c_str(), &end, 10, MPFR_RNDN), end == s.c_str() || *end != '\0') {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: " + s);
  }
}

long Real::exponent2() const {
  if (mpfr_zero_p(v_)) return -(1L << 40);
  return mpfr_get_exp(v_);
}

std::string Real::to_string(int digits) const {
  digits = std::max(digits, 1);
  if (mpfr_zero_p(v_)) {
    std::string s = "0";
    if (digits > 1) s += "." + std::string(digits - 1, '0');
    return s + "e+00";
  }
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

std::string Real::to_string() const {
  const int digits = static_cast<int>(std::ceil(static_cast<double>(prec()) * 0.30102999566398120)) + 1;
  return to_string(digits);
}

Real& Real::operator+=(const Real& o) {
  widen(v_, o.prec());
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  widen(v_, o.prec());
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  widen(v_, o.prec());
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  widen(v_, o.prec());
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real operator-(long a, const Real& b) {
  Real r(b.prec());
  mpfr_si_sub(r.get(), a, b.get(), MPFR_RNDN);
  return r;
}
Real operator/(long a, const Real& b) {
  Real r(b.prec());
  mpfr_si_div(r.get(), a, b.get(), MPFR_RNDN);
  return r;
}

Real pi(prec_t prec) {
  Real r(prec);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real gamma(const Real& x) { return unary(x, mpfr_gamma); }

std::pair<Real, Real> sin_cos(const Real& x) {
  Real s(x.prec()), c(x.prec());
  mpfr_sin_cos(s.get(), c.get(), x.get(), MPFR_RNDN);
  return {std::move(s), std::move(c)};
}

Real atan2(const Real& y, const Real& x) {
  Real r(std::max(x.prec(), y.prec()));
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r(std::max(x.prec(), y.prec()));
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, long n) {
  Real r(x.prec());
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}

Real floor(const Real& x) {
  Real r(x.prec());
  mpfr_floor(r.get(), x.get());
  return r;
}

Real round(const Real& x) {
  Real r(x.prec());
  mpfr_round(r.get(), x.get());
  return r;
}

Real lgamma_abs(const Real& x) {
  Real r(x.prec());
  int sign = 0;
  mpfr_lgamma(r.get(), &sign, x.get(), MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r(x);
  mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
  return r;
}

Real pow2(long e, prec_t prec) {
  Real r(1L, prec);
  mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
  return r;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  im = re * o.im + im * o.re;
  re = std::move(r);
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  const Real den = norm(o);
  Real r = (re * o.re + im * o.im) / den;
  im = (im * o.re - re * o.im) / den;
  re = std::move(r);
  return *this;
}

Complex conj(const Complex& z) { return {z.re, -z.im}; }
Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real abs(const Complex& z) {
  Real r(z.prec());
  mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  return r;
}

Real arg(const Complex& z) { return atan2(z.im, z.re); }

Complex exp(const Complex& z) {
  const Real m = exp(z.re);
  auto [s, c] = sin_cos(z.im);
  return {m * c, m * s};
}

Complex expi(const Real& theta) {
  auto [s, c] = sin_cos(theta);
  return {std::move(c), std::move(s)};
}

Complex sqrt(const Complex& z) {
  const prec_t p = z.prec();
  if (z.re.is_zero() && z.im.is_zero()) return Complex(p);
  // w = sqrt((|z| + |re|)/2); principal root has Re >= 0.
  const Real w = sqrt((abs(z) + abs(z.re)) / 2L);
  if (z.re.sign() >= 0) return {w, z.im / (w * 2L)};
  Real im = z.im.sign() >= 0 ? w : -w;
  return {z.im / (im * 2L), std::move(im)};
}

Complex pow(const Complex& z, long n) {
  if (n < 0) {
    Complex one(Real(1L, z.prec()));
    return one / pow(z, -n);
  }
  Complex result(Real(1L, z.prec()));
  Complex base = z;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

Complex mul_i(const Complex& z) { return {-z.im, z.re}; }

}  // namespace cmtrace
