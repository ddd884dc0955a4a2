#include "cmtrace/qseries.hpp"

#include <algorithm>
#include <string>

#include "cmtrace/errors.hpp"

namespace cmtrace {

IntSeries IntSeries::one(std::size_t truncation) {
  IntSeries s(truncation);
  s[0] = 1;
  return s;
}

IntSeries IntSeries::dilate(int k) const {
  IntSeries r(truncation());
  r.offset24 = offset24 * k;
  for (std::size_t n = 0; n * k <= truncation(); ++n) r[n * k] = coeffs[n];
  return r;
}

IntSeries IntSeries::inverse() const {
  const BigInt& lead = coeffs.at(0);
  if (lead != 1 && lead != -1) throw InexactDivision("inverse: constant term is not a unit");
  IntSeries r(truncation());
  r.offset24 = -offset24;
  r[0] = lead;  // 1/lead == lead for units
  for (std::size_t n = 1; n <= truncation(); ++n) {
    BigInt acc = 0;
    for (std::size_t j = 1; j <= n; ++j) acc += coeffs[j] * r[n - j];
    r[n] = -acc * lead;
  }
  return r;
}

IntSeries operator*(const IntSeries& a, const IntSeries& b) {
  const std::size_t T = std::min(a.truncation(), b.truncation());
  IntSeries r(T);
  r.offset24 = a.offset24 + b.offset24;
  for (std::size_t i = 0; i <= T; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j <= T; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

IntSeries operator+(const IntSeries& a, const IntSeries& b) {
  const std::size_t T = std::min(a.truncation(), b.truncation());
  IntSeries r(T);
  r.offset24 = a.offset24;
  for (std::size_t i = 0; i <= T; ++i) r[i] = a[i] + b[i];
  return r;
}

IntSeries operator-(const IntSeries& a, const IntSeries& b) {
  const std::size_t T = std::min(a.truncation(), b.truncation());
  IntSeries r(T);
  r.offset24 = a.offset24;
  for (std::size_t i = 0; i <= T; ++i) r[i] = a[i] - b[i];
  return r;
}

IntSeries operator*(const BigInt& s, const IntSeries& a) {
  IntSeries r = a;
  for (auto& c : r.coeffs) c *= s;
  return r;
}

BigInt LaurentSeries::at(std::int64_t n) const {
  const std::int64_t i = n - valuation;
  if (i < 0 || i >= static_cast<std::int64_t>(coeffs.size())) return 0;
  return coeffs[static_cast<std::size_t>(i)];
}

std::vector<BigInt> divisor_sums(int k, std::size_t T) {
  std::vector<BigInt> sigma(T + 1, 0);
  for (std::size_t d = 1; d <= T; ++d) {
    BigInt dk = boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(k));
    for (std::size_t n = d; n <= T; n += d) sigma[n] += dk;
  }
  return sigma;
}

IntSeries eta_power_coeffs(int e, std::size_t T) {
  const auto sigma = divisor_sums(1, T);
  IntSeries c(T);
  c.offset24 = e;
  c[0] = 1;
  for (std::size_t n = 1; n <= T; ++n) {
    BigInt acc = 0;
    for (std::size_t j = 1; j <= n; ++j) acc += sigma[j] * c[n - j];
    acc *= -e;
    BigInt q, r;
    boost::multiprecision::divide_qr(acc, BigInt(n), q, r);
    if (r != 0) throw InexactDivision("eta_power_coeffs: remainder at n=" + std::to_string(n));
    c[n] = q;
  }
  return c;
}

IntSeries mock_theta_coeffs(std::size_t T) {
  IntSeries f = IntSeries::one(T);
  // inv = prod_{j<=n} (1+q^j)^{-2}, updated one factor at a time.
  IntSeries inv = IntSeries::one(T);
  for (std::size_t n = 1; n * n <= T; ++n) {
    for (int twice = 0; twice < 2; ++twice) {
      // Multiply by 1/(1+q^n): r[i] = inv[i] - r[i-n].
      for (std::size_t i = n; i <= T; ++i) inv[i] -= inv[i - n];
    }
    for (std::size_t i = 0; i + n * n <= T; ++i) f[i + n * n] += inv[i];
  }
  return f;
}

IntSeries e4_coeffs(std::size_t T) {
  const auto sigma3 = divisor_sums(3, T);
  IntSeries e(T);
  e[0] = 1;
  for (std::size_t n = 1; n <= T; ++n) e[n] = 240 * sigma3[n];
  return e;
}

LaurentSeries gamma0_6_F_coeffs(std::size_t T) {
  // F = q^{-1} * num(q) / den(q) with the eta prefactors q^{(2+4+6+12)/24} = q
  // pulled out of the denominator. Expanding the quotient to q^{T+1} gives
  // the coefficients of q^{-1} .. q^T.
  const std::size_t M = T + 1;
  const IntSeries e4 = e4_coeffs(M);
  const IntSeries num = e4 + BigInt(4) * e4.dilate(2) - BigInt(9) * e4.dilate(3) - BigInt(36) * e4.dilate(6);

  const IntSeries p = eta_power_coeffs(2, M);
  IntSeries den = p * p.dilate(2) * p.dilate(3) * p.dilate(6);
  den.offset24 = 0;
  IntSeries quotient = num * den.inverse();

  LaurentSeries out;
  out.valuation = -1;
  out.coeffs.reserve(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    const BigRational c = BigRational(quotient[i]) / BigRational(-40);
    if (boost::multiprecision::denominator(c) != 1)
      throw NonIntegralCoefficient("gamma0_6_F_coeffs: q^" + std::to_string(static_cast<long>(i) - 1));
    out.coeffs.push_back(boost::multiprecision::numerator(c));
  }
  return out;
}

}  // namespace cmtrace
