#ifndef CMTRACE_NUMKERNEL_HPP
#define CMTRACE_NUMKERNEL_HPP

#include <cstdint>
#include <tuple>
#include <vector>

#include "cmtrace/errors.hpp"
#include "cmtrace/real.hpp"

namespace cmtrace {

/// Precision policy. All arithmetic runs at working() bits; results handed
/// back to callers are rounded to prec_bits.
struct PrecCtx {
  prec_t prec_bits = 128;
  prec_t guard_bits = 64;
  /// Number of guard doublings kummer_m may try before giving up.
  int max_escalations = 4;

  PrecCtx() = default;
  explicit PrecCtx(prec_t prec, prec_t guard = 64) : prec_bits(prec), guard_bits(guard) {
    if (prec < 53) throw ConfigError("prec_bits must be >= 53");
  }

  prec_t working() const { return prec_bits + guard_bits; }
  PrecCtx with_prec(prec_t prec) const {
    PrecCtx c = *this;
    c.prec_bits = prec;
    return c;
  }
  Real real(long v) const { return Real(v, working()); }
  /// 2^-prec_bits at working precision.
  Real eps() const { return pow2(-static_cast<long>(prec_bits), working()); }
};

// ---------------------------------------------------------------------------
// Integer helpers

std::int64_t gcd(std::int64_t a, std::int64_t b);
/// (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t a, std::int64_t b);
/// Floor division and non-negative modulus.
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t mod(std::int64_t a, std::int64_t m);
/// Positive divisors in ascending order.
std::vector<std::int64_t> divisors(std::int64_t n);
bool is_square(std::int64_t n);
bool is_squarefree(std::int64_t n);
/// True for 1 and for discriminants of quadratic fields.
bool is_fundamental_discriminant(std::int64_t d);

/// Kronecker symbol (a/n), fully extended to n <= 0.
int kronecker(std::int64_t a, std::int64_t n);

// ---------------------------------------------------------------------------
// Real kernels

/// Gamma(two_x / 2) in closed form: factorial at integers, the
/// (2m)! sqrt(pi) / (4^m m!) pattern at half-integers.
Real gamma_half(long two_x, const PrecCtx& ctx);

/// Kummer's confluent series M(a, b, y) = sum (a)_j / ((b)_j j!) y^j, y >= 0.
///
/// Tracks the largest partial term; when log2(max term / |result|) eats more
/// than the guard bits, re-runs with doubled guard. Throws NonConvergent once
/// ctx.max_escalations doublings did not suffice, std::domain_error when b is
/// a non-positive integer or y < 0.
Real kummer_m(const Real& a, const Real& b, const Real& y, const PrecCtx& ctx);
/// Same series, result kept at ctx.working() bits for use inside other kernels.
Real kummer_m_working(const Real& a, const Real& b, const Real& y, const PrecCtx& ctx);

/// Neumaier-compensated accumulator for Real or Complex terms.
template <class T>
class CompensatedSum {
 public:
  explicit CompensatedSum(prec_t prec) : sum_(prec), comp_(prec) {}
  void add(const T& x);
  T value() const { return sum_ + comp_; }

 private:
  T sum_;
  T comp_;
};

template <>
inline void CompensatedSum<Real>::add(const Real& x) {
  Real t = sum_ + x;
  if (abs(sum_) >= abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = std::move(t);
}

template <>
inline void CompensatedSum<Complex>::add(const Complex& x) {
  for (int part = 0; part < 2; ++part) {
    Real& s = part ? sum_.im : sum_.re;
    Real& c = part ? comp_.im : comp_.re;
    const Real& v = part ? x.im : x.re;
    Real t = s + v;
    if (abs(s) >= abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = std::move(t);
  }
}

}  // namespace cmtrace

#endif  // CMTRACE_NUMKERNEL_HPP
