#ifndef CMTRACE_QSERIES_HPP
#define CMTRACE_QSERIES_HPP

// Exact integer power series. These supply the ground-truth side of every
// identity check, so nothing here ever touches floating point.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace cmtrace {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Truncated series sum_{n=0}^{T} c(n) q^n, optionally multiplied by a
/// fractional prefactor q^{offset24/24} that is carried as metadata only.
///
/// For eta(z)^e = q^{e/24} prod (1-q^n)^e the integer series holds the
/// product and offset24 = e. The coefficient of eta^e at q^{(24n+e)/24} is
/// therefore coeffs[n]; for e = -25, index (24n-1)/24 maps to coeffs[n+1].
struct IntSeries {
  std::vector<BigInt> coeffs;
  int offset24 = 0;

  IntSeries() = default;
  explicit IntSeries(std::size_t truncation) : coeffs(truncation + 1) {}

  std::size_t truncation() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  const BigInt& operator[](std::size_t n) const { return coeffs[n]; }
  BigInt& operator[](std::size_t n) { return coeffs[n]; }

  /// 1 + O(q^{T+1})
  static IntSeries one(std::size_t truncation);
  /// f(q^k), truncated to the same order.
  IntSeries dilate(int k) const;
  /// Multiplicative inverse; the constant term must be +1 or -1.
  IntSeries inverse() const;

  friend bool operator==(const IntSeries&, const IntSeries&) = default;
};

/// Products and sums truncate to the smaller truncation order and add offsets.
IntSeries operator*(const IntSeries& a, const IntSeries& b);
IntSeries operator+(const IntSeries& a, const IntSeries& b);
IntSeries operator-(const IntSeries& a, const IntSeries& b);
IntSeries operator*(const BigInt& s, const IntSeries& a);

/// Series starting at q^valuation: coeffs[i] multiplies q^{valuation + i}.
struct LaurentSeries {
  std::int64_t valuation = 0;
  std::vector<BigInt> coeffs;

  /// Coefficient of q^n (zero outside the stored range).
  BigInt at(std::int64_t n) const;
};

/// sigma_k(n) for n = 0..T (sigma_k(0) := 0), by divisor sieve.
std::vector<BigInt> divisor_sums(int k, std::size_t T);

/// prod_{n>=1} (1-q^n)^e via c(n) = -(e/n) sum_{j=1}^{n} sigma_1(j) c(n-j).
/// Throws InexactDivision if any division by n leaves a remainder.
IntSeries eta_power_coeffs(int e, std::size_t T);

/// Third-order mock theta f(q) = 1 + sum q^{n^2} / prod_{j<=n} (1+q^j)^2.
IntSeries mock_theta_coeffs(std::size_t T);

/// E_4 = 1 + 240 sum sigma_3(n) q^n.
IntSeries e4_coeffs(std::size_t T);

/// q-expansion of the level-6 Hauptmodul-type function
///   F = -(1/40) (E4(z) + 4E4(2z) - 9E4(3z) - 36E4(6z)) / (eta(z)eta(2z)eta(3z)eta(6z))^2,
/// coefficients of q^{-1} .. q^T. Assembled over the rationals; throws
/// NonIntegralCoefficient if the quotient is not an integer series.
LaurentSeries gamma0_6_F_coeffs(std::size_t T);

}  // namespace cmtrace

#endif  // CMTRACE_QSERIES_HPP
