#include <doctest.h>

#include <random>

#include "cmtrace/modeval.hpp"
#include "cmtrace/qseries.hpp"

using namespace cmtrace;

namespace {

const PrecCtx ctx(128);
const prec_t wp = ctx.working();

Complex cx(double re, double im) { return {Real(re, wp), Real(im, wp)}; }
Complex cx(const Real& re, const Real& im) { return {Real(re, wp), Real(im, wp)}; }

bool close(const Complex& x, const Complex& y, long bits) {
  const Real scale = std::max(abs(y), Real(1L, wp));
  return abs(x - y) <= scale * pow2(-bits, wp);
}

Mat2 random_sl2(std::mt19937_64& rng, std::int64_t N = 1) {
  std::uniform_int_distribution<std::int64_t> dist(-3, 3);
  Mat2 g;
  for (int i = 0; i < 3; ++i) g = g * Mat2::T(dist(rng)) * Mat2{1, 0, N * dist(rng), 1};
  return g;
}

Complex random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.6, 1.5);
  return cx(re(rng), im(rng));
}

}  // namespace

TEST_CASE("fundamental domain reduction") {
  auto [w1, g1] = reduce_fundamental(cx(0, 1), ctx);
  CHECK(g1 == Mat2::identity());
  auto [w2, g2] = reduce_fundamental(cx(5, 1), ctx);
  CHECK(g2 == Mat2::T(-5));
  CHECK(close(w2, cx(0, 1), 126));
  auto [w3, g3] = reduce_fundamental(cx(Real(0L, wp), Real(1L, wp) / 10L), ctx);
  CHECK(g3 == Mat2::S());
  CHECK(close(w3, cx(0, 10), 120));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Complex z = apply(random_sl2(rng), random_point(rng));
    auto [w, g] = reduce_fundamental(z, ctx);
    CHECK(abs(w.re) <= Real(0.5, wp) + pow2(-120, wp));
    CHECK(norm(w) >= Real(1L, wp) - pow2(-120, wp));
    CHECK(close(apply(g, z), w, 110));
  }
}

TEST_CASE("eta functional equations") {
  std::mt19937_64 rng(2);
  const Complex phase = expi(pi(wp) / 12L);
  for (int i = 0; i < 10; ++i) {
    const Complex z = apply(random_sl2(rng), random_point(rng));
    const Complex shifted = z + cx(1, 0);
    CHECK(close(eta(shifted, ctx) / eta(z, ctx), phase, 116));
  }
  const Complex z = cx(0.5, 2);
  const Complex inv = -(cx(1, 0) / z);
  const Complex root = sqrt(Complex(z.im, -z.re));
  CHECK(close(eta(inv, ctx), root * eta(z, ctx), 120));
  CHECK(close(eta(cx(0, 1), ctx), eta_direct(cx(0, 1), ctx), 120));
  CHECK(close(eta(cx(0.3, 0.4), ctx), eta_direct(cx(0.3, 0.4), ctx), 112));
}

TEST_CASE("discriminant function has weight 12") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Mat2 g = random_sl2(rng);
    const Complex z = random_point(rng);
    const Complex d1 = pow(eta(apply(g, z), ctx), 24);
    const Complex jf = z * Real(g.c, wp) + cx(g.d, 0);
    const Complex d0 = pow(eta(z, ctx), 24) * pow(jf, 12);
    CHECK(abs(d1 - d0) <= abs(d0) * pow2(-128 + 12, wp));
  }
}

TEST_CASE("E4 values and transformation") {
  CHECK(close(eisenstein_e4(cx(0, 50), ctx), cx(1, 0), 124));
  const Complex rho = cx(Real(-0.5, wp), sqrt(Real(3L, wp)) / 2);
  CHECK(abs(eisenstein_e4(rho, ctx)) <= pow2(-128 + 8, wp));
  CHECK(close(eisenstein_e4(cx(0, 2), ctx), eisenstein_e4_direct(cx(0, 2), ctx), 120));
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const Mat2 g = random_sl2(rng);
    const Complex z = random_point(rng);
    const Complex jf = z * Real(g.c, wp) + cx(g.d, 0);
    const Complex lhs = eisenstein_e4(apply(g, z), ctx);
    const Complex rhs = eisenstein_e4(z, ctx) * pow(jf, 4);
    CHECK(abs(lhs - rhs) <= abs(rhs) * pow2(-128 + 12, wp));
  }
}

TEST_CASE("j invariant special values") {
  CHECK(close(j_invariant(cx(0, 1), ctx), cx(1728, 0), 128 - 16));
  const Complex rho = cx(Real(-0.5, wp), sqrt(Real(3L, wp)) / 2);
  CHECK(abs(j_invariant(rho, ctx)) <= pow2(-128 + 16, wp));
  CHECK(close(J(rho, ctx), cx(-744, 0), 128 - 16));
  // j(sqrt(-2)) = 8000
  CHECK(close(j_invariant(cx(Real(0L, wp), sqrt(Real(2L, wp))), ctx), cx(8000, 0), 128 - 20));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Complex z = random_point(rng);
    const Complex w = apply(random_sl2(rng), z);
    const Complex a = j_invariant(z, ctx), b = j_invariant(w, ctx);
    CHECK(abs(a - b) <= abs(a) * pow2(-128 + 16, wp));
  }
}

TEST_CASE("level 6 F: q-expansion, invariance, involutions") {
  const Complex z30 = cx(0.1, 30);
  const Complex lead = exp(Complex(z30.im * pi(wp) * 2, -(z30.re * pi(wp) * 2)));  // e^{-2 pi i z}
  CHECK(abs(gamma0_6_F(z30, ctx) / lead - cx(1, 0)) < pow2(-120, wp));

  // Against the exact expansion at 2i (and at 3i to 2^-100).
  for (const double y : {2.0, 3.0}) {
    const Complex z = cx(0, y);
    const auto series = gamma0_6_F_coeffs(120);
    const Complex q = exp(Complex(-(z.im * pi(wp) * 2), z.re * pi(wp) * 2));
    Complex sum(wp), qn = cx(1, 0) / q;
    for (std::int64_t n = -1; n <= 119; ++n) {
      sum += qn * Real(series.at(n).str(), wp);
      qn *= q;
    }
    const Complex direct = gamma0_6_F(z, ctx);
    CHECK(abs(direct - sum) <= abs(sum) * pow2(-100, wp));
  }

  std::mt19937_64 rng(6);
  const Complex z = cx(0.3, 0.7);
  const Complex fz = gamma0_6_F(z, ctx);
  for (int i = 0; i < 5; ++i) {
    const Complex w = apply(random_sl2(rng, 6), z);
    CHECK(abs(gamma0_6_F(w, ctx) - fz) <= abs(fz) * pow2(-128 + 12, wp));
  }
  for (std::int64_t Q : {1, 2, 3, 6}) {
    const ALMatrix W = atkin_lehner_matrix(6, Q);
    const Complex back = gamma0_6_F(W.apply(W.apply(z)), ctx);
    CHECK(abs(back - fz) <= abs(fz) * pow2(-128 + 12, wp));
  }
}

TEST_CASE("Atkin-Lehner matrices") {
  const ALMatrix w6 = atkin_lehner_matrix(6, 6);
  CHECK(w6.scaled() == Mat2{0, 1, -6, 0});
  const ALMatrix w1 = atkin_lehner_matrix(6, 1);
  CHECK(w1.scaled() == Mat2::identity());
  const ALMatrix w2 = atkin_lehner_matrix(6, 2);
  CHECK(w2.scaled() == Mat2{2, 1, 6, 4});
  for (std::int64_t N : {2, 3, 5, 6, 10, 15, 30}) {
    for (std::int64_t Q : divisors(N)) {
      if (gcd(Q, N / Q) != 1) continue;
      const ALMatrix W = atkin_lehner_matrix(N, Q);
      CHECK(W.scaled().det() == Q);
    }
  }
  CHECK_THROWS_AS(atkin_lehner_matrix(12, 2), ConfigError);
}
