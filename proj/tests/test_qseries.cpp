#include <doctest.h>

#include <random>

#include "cmtrace/errors.hpp"
#include "cmtrace/qseries.hpp"

using namespace cmtrace;

namespace {

std::vector<long> as_longs(const IntSeries& s) {
  std::vector<long> v;
  for (const auto& c : s.coeffs) v.push_back(static_cast<long>(c));
  return v;
}

// Independent oracle: multiply out prod_{n<=T} (1-q^n)^e factor by factor.
IntSeries direct_eta_power(int e, std::size_t T) {
  IntSeries r = IntSeries::one(T);
  for (std::size_t n = 1; n <= T; ++n) {
    for (int rep = 0; rep < std::abs(e); ++rep) {
      if (e > 0) {
        for (std::size_t i = T; i >= n; --i) r[i] -= r[i - n];
      } else {
        for (std::size_t i = n; i <= T; ++i) r[i] += r[i - n];
      }
    }
  }
  return r;
}

}  // namespace

TEST_CASE("eta powers: pentagonal numbers and partitions") {
  CHECK(as_longs(eta_power_coeffs(1, 7)) == std::vector<long>{1, -1, -1, 0, 0, 1, 0, 1});
  CHECK(as_longs(eta_power_coeffs(-1, 5)) == std::vector<long>{1, 1, 2, 3, 5, 7});
}

TEST_CASE("eta^-25 coefficients") {
  const IntSeries s = eta_power_coeffs(-25, 4);
  CHECK(s.offset24 == -25);
  CHECK(s[1] == 25);
  CHECK(s[2] == 350);
  CHECK(s[3] == 3575);
  CHECK(s[4] == 29575);
  CHECK(s.coeffs == direct_eta_power(-25, 4).coeffs);
}

TEST_CASE("eta powers multiply additively in the exponent") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> dist(-30, 30);
  for (int i = 0; i < 12; ++i) {
    const int e1 = dist(rng), e2 = dist(rng);
    const IntSeries p = eta_power_coeffs(e1, 40) * eta_power_coeffs(e2, 40);
    CHECK(p.coeffs == eta_power_coeffs(e1 + e2, 40).coeffs);
    CHECK((eta_power_coeffs(e1, 40) * eta_power_coeffs(-e1, 40)).coeffs == IntSeries::one(40).coeffs);
  }
  CHECK(eta_power_coeffs(7, 30).coeffs == direct_eta_power(7, 30).coeffs);
}

TEST_CASE("mock theta coefficients") {
  const IntSeries f = mock_theta_coeffs(12);
  CHECK(as_longs(f) == std::vector<long>{1, 1, -2, 3, -3, 3, -5, 7, -6, 6, -10, 12, -11});
}

TEST_CASE("mock theta by a second expansion order") {
  // Expand each summand q^{n^2} prod (1+q^j)^{-2} separately with its own inverse.
  const std::size_t T = 60;
  IntSeries g = IntSeries::one(T);
  for (std::size_t n = 1; n * n <= T; ++n) {
    IntSeries den = IntSeries::one(T);
    for (std::size_t j = 1; j <= n; ++j) {
      IntSeries fac = IntSeries::one(T);
      fac[j] = 1;
      den = den * fac * fac;
    }
    const IntSeries inv = den.inverse();
    for (std::size_t i = 0; i + n * n <= T; ++i) g[i + n * n] += inv[i];
  }
  CHECK(g.coeffs == mock_theta_coeffs(T).coeffs);
}

TEST_CASE("E4 coefficients") {
  const IntSeries e = e4_coeffs(6);
  CHECK(e[0] == 1);
  CHECK(e[1] == 240);
  CHECK(e[6] == 240 * 252);
}

TEST_CASE("level 6 F expansion") {
  const LaurentSeries F = gamma0_6_F_coeffs(6);
  CHECK(F.valuation == -1);
  CHECK(F.at(-1) == 1);
  CHECK(F.at(0) == -4);
  CHECK(F.at(1) == -83);
  CHECK(F.at(2) == -296);
  CHECK(F.at(3) == -1485);
  CHECK(F.at(-2) == 0);
}

TEST_CASE("inverse requires a unit constant term") {
  IntSeries s(3);
  s[0] = 2;
  CHECK_THROWS_AS(s.inverse(), InexactDivision);
}
