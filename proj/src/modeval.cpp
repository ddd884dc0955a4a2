#include "cmtrace/modeval.hpp"

#include <climits>
#include <cstdlib>
#include <vector>

#include "cmtrace/errors.hpp"

namespace cmtrace {

namespace {

long mag(const Complex& z) {
  const long a = z.re.is_zero() ? LONG_MIN / 2 : z.re.exponent2();
  const long b = z.im.is_zero() ? LONG_MIN / 2 : z.im.exponent2();
  return std::max(a, b);
}

// True once |term| < 2^-bits |sum|.
bool negligible(const Complex& term, const Complex& sum, prec_t bits) {
  return mag(term) < mag(sum) - static_cast<long>(bits) - 2;
}

Complex real_c(long v, prec_t wp) { return {Real(v, wp), Real(0L, wp)}; }

struct Step {
  bool inversion;
  long shift;     // translation z -> z - shift (when !inversion)
  Complex before;  // point the step was applied to
};

std::vector<Step> reduction_steps(Complex& z, Mat2& g, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  const Real one_minus = Real(1L, wp) - pow2(-static_cast<long>(ctx.prec_bits), wp);
  std::vector<Step> steps;
  for (int iter = 0; iter < 10000; ++iter) {
    const long n = round(z.re).to_long();
    if (n != 0) {
      steps.push_back({false, n, z});
      z.re -= n;
      g = Mat2::T(-n) * g;
    }
    if (norm(z) < one_minus) {
      steps.push_back({true, 0, z});
      z = -(real_c(1, wp) / z);
      g = Mat2::S() * g;
      continue;
    }
    return steps;
  }
  throw NonConvergent("reduce_fundamental: no convergence");
}

Complex two_pi_i_times(const Complex& z) {
  const Real tp = pi(z.prec()) * 2;
  return {-(z.im * tp), z.re * tp};
}

Complex pentagonal_sum(const Complex& z, prec_t wp) {
  // q^{1/24} sum_k (-1)^k q^{k(3k-1)/2}
  const Complex tpiz = two_pi_i_times(z);
  Complex sum = real_c(1, wp);
  for (long k = 1;; ++k) {
    const long e1 = k * (3 * k - 1) / 2;
    const long e2 = k * (3 * k + 1) / 2;
    Complex t = exp(tpiz * Real(e1, wp)) + exp(tpiz * Real(e2, wp));
    if (k % 2 == 1) t = -t;
    sum += t;
    if (negligible(t, sum, wp)) break;
  }
  return exp(tpiz / 24L) * sum;
}

Complex e4_sum(const Complex& z, prec_t wp) {
  const Complex q = exp(two_pi_i_times(z));
  Complex qn = real_c(1, wp);
  Complex sum(wp);
  for (long n = 1;; ++n) {
    qn *= q;
    long s3 = 0;
    for (long d = 1; d <= n; ++d)
      if (n % d == 0) s3 += d * d * d;
    const Complex t = qn * s3;
    sum += t;
    if (negligible(t, sum, wp) && n > 2) break;
  }
  return real_c(1, wp) + sum * 240L;
}

}  // namespace

Complex apply(const Mat2& g, const Complex& z) {
  const prec_t wp = z.prec();
  const Complex num = z * Real(g.a, wp) + real_c(g.b, wp);
  const Complex den = z * Real(g.c, wp) + real_c(g.d, wp);
  return num / den;
}

std::pair<Complex, Mat2> reduce_fundamental(const Complex& z, const PrecCtx& ctx) {
  Complex w = z.rounded(std::max(z.prec(), ctx.working()));
  Mat2 g;
  reduction_steps(w, g, ctx);
  return {w, g};
}

Complex eta(const Complex& z, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  Complex w = z.rounded(std::max(z.prec(), wp));
  Mat2 g;
  const auto steps = reduction_steps(w, g, ctx);
  // eta(z0) = factor * eta(w), built up step by step.
  long phase24 = 0;  // multiples of e^{i pi / 12}
  Complex factor = real_c(1, wp);
  for (const Step& s : steps) {
    if (s.inversion) {
      // eta(-1/u) = sqrt(-iu) eta(u)
      const Complex minus_i_u{s.before.im, -s.before.re};
      factor /= sqrt(minus_i_u);
    } else {
      // eta(u) = e^{i pi n / 12} eta(u - n)
      phase24 += s.shift;
    }
  }
  phase24 = mod(phase24, 24);
  const Complex phase = expi(pi(wp) * phase24 / 12L);
  return (factor * phase * pentagonal_sum(w, wp)).rounded(wp);
}

Complex eta_direct(const Complex& z, const PrecCtx& ctx) {
  return pentagonal_sum(z.rounded(ctx.working()), ctx.working());
}

Complex eisenstein_e4(const Complex& z, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  auto [w, g] = reduce_fundamental(z, ctx);
  // E4(g z) = (c z + d)^4 E4(z)
  const Complex jf = z.rounded(wp) * Real(g.c, wp) + real_c(g.d, wp);
  return e4_sum(w, wp) / pow(jf, 4);
}

Complex eisenstein_e4_direct(const Complex& z, const PrecCtx& ctx) {
  return e4_sum(z.rounded(ctx.working()), ctx.working());
}

Complex j_invariant(const Complex& z, const PrecCtx& ctx) {
  // Both factors are invariant expressions at the reduced point, so evaluate there.
  const prec_t wp = ctx.working();
  const Complex w = reduce_fundamental(z, ctx).first;
  const Complex e4 = e4_sum(w, wp);
  return pow(e4, 3) / pow(pentagonal_sum(w, wp), 24);
}

Complex J(const Complex& z, const PrecCtx& ctx) {
  return j_invariant(z, ctx) - real_c(744, ctx.working());
}

Complex gamma0_6_F(const Complex& z, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  const Complex z1 = z.rounded(std::max(z.prec(), wp));
  const Complex z2 = z1 * 2L, z3 = z1 * 3L, z6 = z1 * 6L;
  const Complex num = eisenstein_e4(z1, ctx) + eisenstein_e4(z2, ctx) * 4L - eisenstein_e4(z3, ctx) * 9L -
                      eisenstein_e4(z6, ctx) * 36L;
  const Complex e = eta(z1, ctx) * eta(z2, ctx) * eta(z3, ctx) * eta(z6, ctx);
  return -(num / (e * e)) / 40L;
}

Complex ALMatrix::j_factor(const Complex& z) const {
  const prec_t wp = z.prec();
  const Complex v = z * Real(N * c, wp) + real_c(Q * d, wp);
  return v / sqrt(Real(Q, wp));
}

ALMatrix atkin_lehner_matrix(std::int64_t N, std::int64_t Q) {
  if (Q <= 0 || N % Q != 0 || gcd(Q, N / Q) != 1)
    throw ConfigError("atkin_lehner_matrix: Q must exactly divide N");
  const std::int64_t R = N / Q;
  const std::int64_t bound = 2 * N + 2;
  auto signed_order = [](std::int64_t k) {  // 0, 1, -1, 2, -2, ...
    return std::vector<std::int64_t>{k, -k};
  };
  for (std::int64_t mb = 0; mb <= bound; ++mb) {
    for (const std::int64_t b : signed_order(mb)) {
      for (std::int64_t mc = 0; mc <= bound; ++mc) {
        for (const std::int64_t c : signed_order(mc)) {
          const std::int64_t rhs = 1 + R * b * c;  // = Q a d
          if (rhs == 0) return {0, b, c, 0, N, Q};
          for (std::int64_t ma = 1; ma <= std::abs(rhs); ++ma) {
            for (const std::int64_t a : signed_order(ma)) {
              if (rhs % (Q * a) != 0) continue;
              return {a, b, c, rhs / (Q * a), N, Q};
            }
          }
          if (mc == 0) break;
        }
      }
      if (mb == 0) break;
    }
  }
  throw NoSolution("atkin_lehner_matrix: no solution found");
}

}  // namespace cmtrace
