#ifndef CMTRACE_REAL_HPP
#define CMTRACE_REAL_HPP

// Thin value-semantic wrapper around an MPFR number.
//
// Every Real carries its own precision. Binary operations produce a result at
// the larger of the two operand precisions, so no global precision state is
// consulted anywhere and values can be moved freely between threads.

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>
#include <utility>

namespace cmtrace {

using prec_t = mpfr_prec_t;

class Real {
 public:
  explicit Real(prec_t prec = 53) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(long value, prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, value, MPFR_RNDN); }
  Real(int value, prec_t prec) : Real(static_cast<long>(value), prec) {}
  Real(double value, prec_t prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, value, MPFR_RNDN); }
  /// Parses a decimal string ("1.25e-3", "-7"). Throws std::invalid_argument.
  Real(std::string_view text, prec_t prec);
  /// Copy of `other` rounded to `prec`.
  Real(const Real& other, prec_t prec) { mpfr_init2(v_, prec); mpfr_set(v_, other.v_, MPFR_RNDN); }

  Real(const Real& other) { mpfr_init2(v_, other.prec()); mpfr_set(v_, other.v_, MPFR_RNDN); }
  Real(Real&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      mpfr_set_prec(v_, other.prec());
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  /// Binary exponent e with 2^(e-1) <= |x| < 2^e; very negative for zero.
  long exponent2() const;

  /// Scientific decimal string with `digits` significant digits, e.g.
  /// "-1.2345e+02". Zero always prints unsigned.
  std::string to_string(int digits) const;
  /// Digits needed to round-trip this value's precision.
  std::string to_string() const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator+=(long o) { mpfr_add_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator-=(long o) { mpfr_sub_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }

  Real operator-() const {
    Real r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

 private:
  mpfr_t v_;
};

inline Real operator+(Real a, const Real& b) { return a += b; }
inline Real operator-(Real a, const Real& b) { return a -= b; }
inline Real operator*(Real a, const Real& b) { return a *= b; }
inline Real operator/(Real a, const Real& b) { return a /= b; }
inline Real operator+(Real a, long b) { return a += b; }
inline Real operator-(Real a, long b) { return a -= b; }
inline Real operator*(Real a, long b) { return a *= b; }
inline Real operator/(Real a, long b) { return a /= b; }
inline Real operator*(long a, Real b) { return b *= a; }
inline Real operator+(long a, Real b) { return b += a; }
Real operator-(long a, const Real& b);
Real operator/(long a, const Real& b);

inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
inline std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.get(), b.get())) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.get(), b.get());
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}
inline bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.get(), b) == 0; }
inline std::partial_ordering operator<=>(const Real& a, long b) {
  const int c = mpfr_cmp_si(a.get(), b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

Real pi(prec_t prec);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
/// (sin x, cos x) in one MPFR call.
std::pair<Real, Real> sin_cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real abs(const Real& x);
Real floor(const Real& x);
Real round(const Real& x);
Real lgamma_abs(const Real& x);
Real gamma(const Real& x);
/// x * 2^e, exact.
Real ldexp(const Real& x, long e);
/// 2^e at precision `prec`.
Real pow2(long e, prec_t prec);

/// Complex number with Real parts at a common precision.
struct Complex {
  Real re;
  Real im;

  explicit Complex(prec_t prec = 53) : re(prec), im(prec) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(const Real& r) : re(r), im(r.prec()) {}

  prec_t prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }
  Complex rounded(prec_t prec) const { return {Real(re, prec), Real(im, prec)}; }

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o) { re *= o; im *= o; return *this; }
  Complex& operator/=(const Real& o) { re /= o; im /= o; return *this; }
  Complex& operator*=(long o) { re *= o; im *= o; return *this; }
  Complex& operator/=(long o) { re /= o; im /= o; return *this; }
  Complex operator-() const { return {-re, -im}; }
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator*(Complex a, const Real& b) { return a *= b; }
inline Complex operator*(const Real& b, Complex a) { return a *= b; }
inline Complex operator/(Complex a, const Real& b) { return a /= b; }
inline Complex operator*(Complex a, long b) { return a *= b; }
inline Complex operator*(long b, Complex a) { return a *= b; }
inline Complex operator/(Complex a, long b) { return a /= b; }

Complex conj(const Complex& z);
/// |z|^2
Real norm(const Complex& z);
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex exp(const Complex& z);
/// Principal branch, Re >= 0, branch cut on the negative real axis.
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, long n);
/// e^{i*theta}
Complex expi(const Real& theta);
/// i * z
Complex mul_i(const Complex& z);

}  // namespace cmtrace

#endif  // CMTRACE_REAL_HPP
