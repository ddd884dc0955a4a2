#include "cmtrace/numkernel.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cmtrace {

std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t a, std::int64_t b) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::int64_t tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + (m < 0 ? -m : m) : r;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  n = n < 0 ? -n : n;
  std::vector<std::int64_t> small, large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d * d != n) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

bool is_square(std::int64_t n) {
  if (n < 0) return false;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n;
}

bool is_squarefree(std::int64_t n) {
  n = n < 0 ? -n : n;
  if (n == 0) return false;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
    if (n % p == 0) n /= p;
  }
  return true;
}

bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 1) return true;
  if (d == 0) return false;
  const std::int64_t m4 = mod(d, 4);
  if (m4 == 1) return is_squarefree(d);
  if (m4 != 0) return false;
  const std::int64_t e = d / 4;
  const std::int64_t m = mod(e, 4);
  return (m == 2 || m == 3) && is_squarefree(e);
}

int kronecker(std::int64_t a, std::int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  int twos = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++twos;
  }
  if (twos > 0) {
    if ((a & 1) == 0) return 0;
    const std::int64_t a8 = mod(a, 8);
    if ((twos & 1) && (a8 == 3 || a8 == 5)) result = -result;
  }
  // Jacobi symbol for odd n > 0.
  std::int64_t x = mod(a, n);
  std::int64_t m = n;
  while (x != 0) {
    while ((x & 1) == 0) {
      x >>= 1;
      const std::int64_t m8 = m & 7;
      if (m8 == 3 || m8 == 5) result = -result;
    }
    std::swap(x, m);
    if ((x & 3) == 3 && (m & 3) == 3) result = -result;
    x %= m;
  }
  return m == 1 ? result : 0;
}

Real gamma_half(long two_x, const PrecCtx& ctx) {
  if (two_x < 1) throw std::domain_error("gamma_half: argument must be positive");
  const prec_t wp = ctx.working();
  Real r(wp);
  if (two_x % 2 == 0) {
    mpfr_fac_ui(r.get(), static_cast<unsigned long>(two_x / 2 - 1), MPFR_RNDN);
  } else {
    // Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)
    const unsigned long m = static_cast<unsigned long>((two_x - 1) / 2);
    Real num(wp), den(wp);
    mpfr_fac_ui(num.get(), 2 * m, MPFR_RNDN);
    mpfr_fac_ui(den.get(), m, MPFR_RNDN);
    r = ldexp(num / den, -2 * static_cast<long>(m)) * sqrt(pi(wp));
  }
  return Real(r, ctx.prec_bits);
}

namespace {

bool is_nonpositive_integer(const Real& x) {
  return x.sign() <= 0 && mpfr_integer_p(x.get());
}

}  // namespace

Real kummer_m_working(const Real& a, const Real& b, const Real& y, const PrecCtx& ctx) {
  if (is_nonpositive_integer(b)) throw std::domain_error("kummer_m: b is a non-positive integer");
  if (y.sign() < 0) throw std::domain_error("kummer_m: y must be non-negative");

  const double ad = a.to_double(), bd = b.to_double(), yd = y.to_double();
  prec_t guard = ctx.guard_bits;
  for (int attempt = 0; attempt <= ctx.max_escalations; ++attempt, guard *= 2) {
    const prec_t wp = ctx.prec_bits + guard;
    const Real aw(a, wp), bw(b, wp), yw(y, wp);
    Real sum(1L, wp), term(1L, wp);
    long max_exp = 1;  // exponent of the largest |term| so far (term_0 = 1)
    const long stop_exp = -static_cast<long>(wp) - 2;
    constexpr long kMaxTerms = 1000000;
    bool converged = false;
    for (long j = 0; j < kMaxTerms; ++j) {
      term *= (aw + j);
      term *= yw;
      term /= (bw + j);
      term /= (j + 1);
      if (term.is_zero()) {  // a is a non-positive integer: polynomial
        converged = true;
        break;
      }
      sum += term;
      max_exp = std::max(max_exp, term.exponent2());
      // Terms shrink monotonically once the next ratio stays below 1/2.
      const double jn = static_cast<double>(j + 1);
      const double ratio = std::abs((ad + jn) * yd / ((bd + jn) * (jn + 1)));
      if (ratio < 0.5 && term.exponent2() - sum.exponent2() < stop_exp) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NonConvergent("kummer_m: series did not converge");
    const long lost = sum.is_zero() ? static_cast<long>(wp) : max_exp - sum.exponent2();
    if (lost <= static_cast<long>(guard)) return Real(sum, ctx.working());
  }
  throw NonConvergent("kummer_m: cancellation exceeded the guard-bit escalation ceiling");
}

Real kummer_m(const Real& a, const Real& b, const Real& y, const PrecCtx& ctx) {
  return Real(kummer_m_working(a, b, y, ctx), ctx.prec_bits);
}

}  // namespace cmtrace
