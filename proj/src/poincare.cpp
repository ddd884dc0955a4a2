#include "cmtrace/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cmtrace/errors.hpp"
#include "cmtrace/modeval.hpp"
#include "cmtrace/parallel.hpp"

namespace cmtrace {

namespace {

constexpr std::size_t kMaxRows = 2000000;

Complex real_c(long v, prec_t wp) { return {Real(v, wp), Real(0L, wp)}; }

// Gamma(x) at working precision; closed form at integers and half-integers.
Real gamma_of(double x, const PrecCtx& ctx) {
  const double two_x = 2 * x;
  if (x > 0 && two_x == std::floor(two_x) && two_x < 1e6)
    return gamma_half(static_cast<long>(two_x), ctx.with_prec(ctx.working()));
  return gamma(Real(x, ctx.working()));
}

void check_spec(const PoincareSpec& spec) {
  if (!(spec.s > 1.0)) throw NonConvergent("poincare: the coset sum needs Re(s) > 1");
  if (spec.k % 2 != 0) throw ConfigError("poincare: weight must be even");
  if (spec.m <= 0 || spec.N <= 0) throw ConfigError("poincare: need m > 0 and N > 0");
  if (spec.c_max && *spec.c_max < 0) throw ConfigError("poincare: c_max must be >= 0");
}

// (c z + d)^{-k}
Complex automorphy(const Complex& j, int k) {
  if (k == 0) return real_c(1, j.prec());
  if (k < 0) return pow(j, -k);
  return real_c(1, j.prec()) / pow(j, k);
}

Complex row_term(const PoincareSpec& spec, const Complex& z, const Mat2& g, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  const Complex j = z * Real(g.c, wp) + real_c(g.d, wp);
  const Real y = z.im / norm(j);
  const Complex gz = apply(g, z);
  const Real two_pi_m = pi(wp) * 2 * spec.m;
  const Real Y = two_pi_m * 2 * y;
  Complex v = expi(-(two_pi_m * gz.re)) * whittaker_M_cal(Real(spec.s, wp), spec.k, Y, ctx);
  if (g.c != 0 && spec.k != 0) v *= automorphy(j, spec.k);
  return v;
}

Complex al_point(const PoincareSpec& spec, const Complex& z) {
  if (spec.al_word == 1) return z;
  return atkin_lehner_matrix(spec.N, spec.al_word).apply(z);
}

// Factor (F |_k W)(z) / F(W z).
Complex al_factor(const PoincareSpec& spec, const Complex& z, prec_t wp) {
  if (spec.al_word == 1 || spec.k == 0) return real_c(1, wp);
  const ALMatrix W = atkin_lehner_matrix(spec.N, spec.al_word);
  return automorphy(W.j_factor(z.rounded(wp)), spec.k);
}

double log_tail(const PoincareSpec& spec, double y, double R) {
  const double s = spec.s;
  const double mm = static_cast<double>(spec.m);
  return -std::lgamma(2 * s) + (s - spec.k / 2.0) * std::log(4 * M_PI * mm * y) + 2 * M_PI * mm * y / (R * R) +
         std::log(6.0 / (M_PI * static_cast<double>(spec.N) * y)) + (2 - 2 * s) * std::log(R) -
         std::log(2 * s - 2);
}

struct Plan {
  std::vector<Mat2> rows;
  double radius = 1.0;
  double tail_radius = 1.0;
};

Plan make_plan(const PoincareSpec& spec, const Complex& w, const PrecCtx& ctx) {
  const double y = w.im.to_double();
  Plan plan;
  // Phase 1: rows with |cz+d| <= 1 fix the magnitude scale.
  const std::vector<Mat2> inner = coset_rows(spec.N, w, 1.0, spec.c_max);
  Real smax(ctx.working());
  for (const Mat2& g : inner) {
    const Real a = abs(row_term(spec, w, g, ctx));
    if (a > smax) smax = a;
  }
  const double log_s = smax.is_zero() ? -1e300 : log(smax).to_double() - std::lgamma(2 * spec.s);
  const double floor = spec.term_floor > 0 ? spec.term_floor : std::ldexp(1.0, -static_cast<int>(ctx.prec_bits) - 8);
  const double target = log_s + std::log(floor);

  double lo = 0.0, hi = 1.0;
  while (log_tail(spec, y, std::exp(hi)) > target && hi < 700) hi *= 2;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_tail(spec, y, std::exp(mid)) > target)
      lo = mid;
    else
      hi = mid;
  }
  double R0 = std::max(1.0, std::exp(hi));
  const double max_r = std::sqrt(static_cast<double>(kMaxRows) * M_PI * static_cast<double>(spec.N) * y / 3.0);
  R0 = std::min(R0, std::max(1.0, max_r));
  plan.radius = R0;
  plan.tail_radius = R0;
  if (spec.c_max) plan.tail_radius = std::min(R0, static_cast<double>(*spec.c_max + spec.N) * y);
  plan.rows = coset_rows(spec.N, w, R0, spec.c_max);
  return plan;
}

Complex sum_rows(const PoincareSpec& spec, const Complex& w, const std::vector<Mat2>& rows, const PrecCtx& ctx,
                 int jobs) {
  std::vector<Complex> terms(rows.size(), Complex(ctx.working()));
  parallel_for(rows.size(), jobs, [&](std::size_t i) { terms[i] = row_term(spec, w, rows[i], ctx); });
  CompensatedSum<Complex> acc(ctx.working());
  for (const Complex& t : terms) acc.add(t);
  return acc.value() / gamma_of(2 * spec.s, ctx);
}

}  // namespace

int PoincareCombo::raise_count() const {
  if (terms.empty()) return 0;
  const int w = terms.front().spec.k;
  for (const auto& t : terms)
    if (t.spec.k != w || t.spec.s != terms.front().spec.s || t.spec.N != terms.front().spec.N)
      throw ConfigError("PoincareCombo: terms must share (s, k, N)");
  if (w > 0) throw ConfigError("PoincareCombo: weight must be <= 0");
  return -w / 2;
}

Real whittaker_M_cal(const Real& s, int k, const Real& y, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  if (y.sign() <= 0) throw std::domain_error("whittaker_M_cal: y must be positive");
  const Real sw(s, wp), yw(y, wp);
  const Real half_k = Real(static_cast<long>(k), wp) / 2L;
  const Real M = kummer_m_working(sw + half_k, sw * 2L, yw, ctx);
  return exp((sw - half_k) * log(yw) - yw / 2L) * M;
}

Mat2 complete_row(std::int64_t c, std::int64_t d) {
  auto [g, x, y] = ext_gcd(c, d);
  if (g != 1) throw ConfigError("complete_row: gcd(c, d) != 1");
  // c x + d y = 1  =>  (y, -x; c, d) has determinant 1.
  return {y, -x, c, d};
}

std::vector<Mat2> coset_rows(std::int64_t N, const Complex& z, double radius, std::optional<std::int64_t> c_max) {
  const double x = z.re.to_double(), y = z.im.to_double();
  std::vector<Mat2> rows{Mat2::identity()};
  for (std::int64_t c = N;; c += N) {
    if (c_max && c > *c_max) break;
    const double cy = static_cast<double>(c) * y;
    if (cy > radius) break;
    const double w = std::sqrt(radius * radius - cy * cy);
    const double centre = -static_cast<double>(c) * x;
    const auto d_lo = static_cast<std::int64_t>(std::ceil(centre - w));
    const auto d_hi = static_cast<std::int64_t>(std::floor(centre + w));
    for (std::int64_t d = d_lo; d <= d_hi; ++d)
      if (gcd(c, d) == 1) rows.push_back(complete_row(c, d));
  }
  return rows;
}

Real poincare_tail(const PoincareSpec& spec, double y, double R, const PrecCtx& ctx) {
  return exp(Real(log_tail(spec, y, R), ctx.working()));
}

std::vector<Mat2> plan_rows(const PoincareSpec& spec, const Complex& z, const PrecCtx& ctx) {
  check_spec(spec);
  const Complex w = al_point(spec, z.rounded(ctx.working()));
  return make_plan(spec, w, ctx).rows;
}

Complex eval_poincare_rows(const PoincareSpec& spec, const Complex& z, const std::vector<Mat2>& rows,
                           const PrecCtx& ctx, int jobs) {
  check_spec(spec);
  const prec_t wp = ctx.working();
  const Complex zw = z.rounded(std::max(z.prec(), wp));
  const Complex w = al_point(spec, zw);
  return sum_rows(spec, w, rows, ctx, jobs) * al_factor(spec, zw, wp);
}

PoincareValue eval_poincare(const PoincareSpec& spec, const Complex& z, const PrecCtx& ctx, int jobs) {
  check_spec(spec);
  const prec_t wp = ctx.working();
  const Complex zw = z.rounded(std::max(z.prec(), wp));
  const Complex w = al_point(spec, zw);
  const Plan plan = make_plan(spec, w, ctx);
  const Complex factor = al_factor(spec, zw, wp);
  PoincareValue out{sum_rows(spec, w, plan.rows, ctx, jobs) * factor, Real(wp), plan.radius, plan.rows.size()};
  out.truncation = poincare_tail(spec, w.im.to_double(), plan.tail_radius, ctx) * abs(factor);
  return out;
}

Real raising_prefactor(std::int64_t m, double s, int k, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  Real r = pow(pi(wp) * 4 * m, static_cast<long>(k));
  for (int j = 0; j < k; ++j) r *= Real(s + j - k, wp);
  return r;
}

PoincareValue eval_dF(const PoincareCombo& combo, const Complex& z, const PrecCtx& ctx, int jobs) {
  const prec_t wp = ctx.working();
  const int k = combo.raise_count();
  PoincareValue out{Complex(wp), Real(wp), 0.0, 0};
  for (const PoincareTerm& t : combo.terms) {
    PoincareSpec weight0 = t.spec;
    weight0.k = 0;
    const PoincareValue v = eval_poincare(weight0, z, ctx, jobs);
    const Complex scale = t.coeff * raising_prefactor(t.spec.m, t.spec.s, k, ctx);
    out.value += scale * v.value;
    out.truncation += abs(scale) * v.truncation;
    out.radius = std::max(out.radius, v.radius);
    out.rows += v.rows;
  }
  return out;
}

namespace {

// -real * conj(epsilon)
Complex apply_epsilon(const Real& real, const TwistParams& tw) {
  if (tw.delta < 0) return {Real(real.prec()), real};  // -real * (-i)
  return {-real, Real(real.prec())};
}

}  // namespace

Complex lift_constants(int k, double s, std::int64_t N, std::int64_t m, const TwistParams& tw, const PrecCtx& ctx) {
  if (k < 0) throw ConfigError("lift_constants: k must be >= 0");
  const prec_t wp = ctx.working();
  const Real pi_w = pi(wp);
  const Real absd(std::abs(tw.delta), wp);
  const Real two(2L, wp);
  const Real sw(s, wp);
  Real prod(1L, wp);
  for (int j = 0; j < k; ++j) prod *= Real(s + j - k, wp);
  Real r(wp);
  if (k % 2 == 0) {
    r = pow(two, Real(2 * s + 2 * k - 1, wp)) * pow(Real(m, wp), static_cast<long>(2 * k + 1)) *
        pow(pi_w, Real((3.0 * k - 1) / 2, wp)) * pow(absd, Real((k + 1) / 2.0, wp)) /
        pow(Real(N, wp), Real(k / 2.0, wp));
    r *= gamma_of(s / 2 + 1, ctx) / gamma_of(2 * s, ctx);
    r *= prod;
    for (int j = 0; j <= k / 2 - 1; ++j) r *= Real(s / 2 + 1 + j, wp);
  } else {
    r = pow(two, Real(2.0 * k - s, wp)) * pow(absd, Real(-k / 2.0, wp)) / gamma_of(s / 2 + 0.5, ctx);
    r *= pow(Real(N, wp), Real((k + 1) / 2.0, wp)) * pow(pi_w, Real(k / 2.0, wp)) * sw * prod;
    for (int j = 0; j <= (k - 1) / 2; ++j) r *= Real(s / 2 - 0.5 - j, wp);
  }
  return apply_epsilon(r, tw);
}

Complex lift_constants_logspace(int k, double s, std::int64_t N, std::int64_t m, const TwistParams& tw,
                                const PrecCtx& ctx) {
  if (k < 0) throw ConfigError("lift_constants: k must be >= 0");
  const prec_t wp = ctx.working();
  const Real log2 = log(Real(2L, wp));
  const Real logpi = log(pi(wp));
  const Real logd = log(Real(std::abs(tw.delta), wp));
  const Real logN = log(Real(N, wp));
  Real acc(wp);
  int sign = 1;
  auto factor = [&](double v) {
    if (v == 0) sign = 0;
    if (v < 0) sign = -sign;
    if (v != 0) acc += log(abs(Real(v, wp)));
  };
  for (int j = 0; j < k; ++j) factor(s + j - k);
  if (k % 2 == 0) {
    acc += log2 * Real(2 * s + 2 * k - 1, wp) + log(Real(m, wp)) * (2 * k + 1) + logpi * Real((3.0 * k - 1) / 2, wp) +
           logd * Real((k + 1) / 2.0, wp) - logN * Real(k / 2.0, wp);
    acc += lgamma_abs(Real(s / 2 + 1, wp)) - lgamma_abs(Real(2 * s, wp));
    for (int j = 0; j <= k / 2 - 1; ++j) factor(s / 2 + 1 + j);
  } else {
    acc += log2 * Real(2.0 * k - s, wp) - logd * Real(k / 2.0, wp) - lgamma_abs(Real(s / 2 + 0.5, wp));
    acc += logN * Real((k + 1) / 2.0, wp) + logpi * Real(k / 2.0, wp);
    factor(s);
    for (int j = 0; j <= (k - 1) / 2; ++j) factor(s / 2 - 0.5 - j);
  }
  Real r = sign == 0 ? Real(wp) : exp(acc);
  if (sign < 0) r = -r;
  return apply_epsilon(r, tw);
}

std::int64_t al_component(std::int64_t h, std::int64_t N, std::int64_t Q) {
  const std::int64_t A = (Q % 2 == 0) ? 2 * Q : Q;
  const std::int64_t B = 2 * N / A;
  for (std::int64_t t = 0; t < 2 * N; ++t)
    if (mod(t + h, A) == 0 && mod(t - h, B) == 0) return t;
  throw NoSolution("al_component: no solution");
}

std::vector<PrincipalTerm> lift_principal_part(const PoincareCombo& combo, const TwistParams& tw, int k,
                                               const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  std::map<std::pair<BigRational, std::int64_t>, Complex> acc;
  const std::int64_t sgn = tw.delta > 0 ? 1 : -1;
  for (const PoincareTerm& t : combo.terms) {
    const PoincareSpec& sp = t.spec;
    const std::int64_t N = sp.N;
    const Complex C = lift_constants(k, sp.s, N, sp.m, tw, ctx);
    for (const std::int64_t n : divisors(sp.m)) {
      const int chi = kronecker(tw.delta, n);
      if (chi == 0) continue;
      const Real nf = k % 2 == 0 ? Real(1L, wp) / pow(Real(n, wp), static_cast<long>(k + 1))
                                 : pow(Real(n, wp), static_cast<long>(k));
      const Complex coef = t.coeff * C * (nf * chi);
      const BigRational e = -BigRational(sp.m * sp.m * std::abs(tw.delta)) / BigRational(4 * N * n * n);
      const std::int64_t h0 = mod(tw.r * (sp.m / n), 2 * N);
      const std::int64_t h1 = al_component(h0, N, sp.al_word);
      const std::int64_t h2 = al_component(mod(-h0, 2 * N), N, sp.al_word);
      for (const auto& [h, c] : {std::pair{h1, coef}, std::pair{h2, coef * sgn}}) {
        auto it = acc.find({e, h});
        if (it == acc.end())
          acc.emplace(std::pair{e, h}, c);
        else
          it->second += c;
      }
    }
  }
  std::vector<PrincipalTerm> out;
  for (const auto& [key, c] : acc)
    if (!(c.re.is_zero() && c.im.is_zero())) out.push_back({key.first, key.second, c});
  return out;
}

}  // namespace cmtrace
