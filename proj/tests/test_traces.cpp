#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cmtrace/qseries.hpp"
#include "cmtrace/traces.hpp"

using namespace cmtrace;

namespace {

TraceRequest zagier(std::int64_t d, SignMode mode = SignMode::PositiveOnly) {
  return {{1, 1}, d, d % 2, 1, {ClosedForm::J}, mode};
}

TraceRequest mock(std::int64_t delta, std::int64_t h) { return {{delta, 1}, 1, h, 6, {ClosedForm::Gamma0_6_F}}; }

Real nearest_int_distance(const Real& x) { return abs(x - round(x)); }

PoincareCombo al_combo(std::int64_t m, const std::array<long, 4>& signs, const Complex& scale, double floor) {
  PoincareCombo c;
  const std::array<std::int64_t, 4> words{1, 2, 3, 6};
  for (int i = 0; i < 4; ++i) {
    PoincareSpec sp;
    sp.m = m;
    sp.s = 14.0;
    sp.k = -26;
    sp.N = 6;
    sp.al_word = words[i];
    sp.term_floor = floor;
    c.terms.push_back({scale * signs[i], sp});
  }
  return c;
}

// F + F~ for the eta^-25 identity.
PoincareCombo eta25_combo(prec_t wp) {
  const Complex one(Real(1L, wp));
  const Complex factor(Real(25L, wp) + pow(Real(5L, wp), 13L));
  PoincareCombo all = al_combo(5, {-1, 1, 1, -1}, one, 1e-36);
  for (const auto& t : al_combo(1, {1, -1, -1, 1}, factor, 1e-36).terms) all.terms.push_back(t);
  return all;
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove(path);
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("traces of J on SL2(Z)") {
  const PrecCtx ctx(128);
  const prec_t wp = ctx.working();
  const TraceReport r3 = trace(zagier(3), ctx);
  CHECK(r3.rows.size() == 1);
  CHECK(r3.rows[0].stabilizer == 3);
  CHECK(abs(r3.value.re + 248) < pow2(-110, wp));
  CHECK(abs(trace(zagier(3, SignMode::Both), ctx).value.re + 496) < pow2(-110, wp));
  CHECK(abs(trace(zagier(4), ctx).value.re - 492) < pow2(-110, wp));
  const std::vector<std::pair<std::int64_t, long>> expected{{7, -4119}, {8, 7256}, {11, -33512}, {12, 53008}, {15, -192513}};
  for (const auto& [d, v] : expected) {
    const TraceReport r = trace(zagier(d), ctx);
    CHECK_MESSAGE(abs(r.value.re - v) < pow2(-64, wp), "d=", d);
    CHECK(abs(r.value.im) < pow2(-64, wp));
  }
}

TEST_CASE("report rows add up to the value") {
  const PrecCtx ctx(128);
  const prec_t wp = ctx.working();
  const TraceReport r = trace(mock(-23, 1), ctx);
  Complex sum(wp);
  for (const TraceRow& row : r.rows) sum += row.value * static_cast<long>(row.chi) / static_cast<long>(row.stabilizer);
  CHECK(abs(sum - r.value) < pow2(-120, wp));
  for (const TraceRow& row : r.rows) CHECK(row.form.disc() == -23);
}

TEST_CASE("mock theta combination") {
  const PrecCtx ctx(128);
  const prec_t wp = ctx.working();
  const std::array<std::int64_t, 4> hs{1, 5, 7, 11};
  const std::array<long, 4> signs{1, -1, 1, -1};
  const std::vector<std::pair<std::int64_t, long>> cases{{-23, 1}, {-47, -2}};
  for (const auto& [delta, af] : cases) {
    std::vector<std::pair<Complex, TraceRequest>> terms;
    for (int i = 0; i < 4; ++i) terms.push_back({Complex(Real(signs[i], wp)), mock(delta, hs[i])});
    const Complex v = trace_combination(terms, ctx);
    // -8 i sqrt|delta| a_f
    const Real expect = sqrt(Real(-delta, wp)) * (-8 * af);
    CHECK_MESSAGE(abs(v.re) < pow2(-100, wp), "delta=", delta);
    CHECK_MESSAGE(abs(v.im - expect) < abs(expect) * pow2(-100, wp), "delta=", delta);
  }
  CHECK(trace_combination({}, ctx).re.is_zero());
  const Complex single = trace_combination({{Complex(Real(1L, wp)), mock(-23, 1)}}, ctx);
  CHECK(abs(single - trace(mock(-23, 1), ctx).value) == Real(0L, wp));
}

TEST_CASE("h-negation symmetry") {
  const PrecCtx ctx(128);
  const prec_t wp = ctx.working();
  TraceSession s(ctx);
  // sgn(delta) = -1
  CHECK(abs(s.trace(mock(-23, 11)).value + s.trace(mock(-23, 1)).value) < pow2(-110, wp));
  CHECK(abs(s.trace(mock(-47, 7)).value + s.trace(mock(-47, 5)).value) < pow2(-110, wp));
  // sgn(delta) = +1
  const TraceRequest a{{1, 1}, 23, 1, 6, {ClosedForm::Gamma0_6_F}};
  TraceRequest b = a;
  b.h = 11;
  CHECK(abs(s.trace(a).value - s.trace(b).value) < pow2(-110, wp));
}

TEST_CASE("integrality of level 6 traces") {
  const PrecCtx ctx(128);
  const prec_t wp = ctx.working();
  for (const std::int64_t d : {23, 47}) {
    const TraceReport r = trace({{1, 1}, d, 1, 6, {ClosedForm::Gamma0_6_F}}, ctx);
    CHECK_MESSAGE(nearest_int_distance(r.value.re) < pow2(-64, wp), "d=", d);
    CHECK(abs(r.value.im) < pow2(-64, wp));
  }
}

TEST_CASE("request validation") {
  const PrecCtx ctx(128);
  CHECK_THROWS_AS(trace({{1, 1}, 3, 0, 1, {ClosedForm::J}}, ctx), ConfigError);  // 0^2 != -3 mod 4
  CHECK_THROWS_AS(trace({{1, 1}, 23, 1, 1, {ClosedForm::Gamma0_6_F}}, ctx), ConfigError);  // level
  CHECK_THROWS_AS(trace({{-23, 1}, 2, 1, 6, {ClosedForm::Gamma0_6_F}}, ctx), ConfigError);  // 2 not a square mod 24
  CHECK_THROWS_AS(trace({{5, 1}, 3, 1, 6, {ClosedForm::Gamma0_6_F}}, ctx), ConfigError);  // r^2 != delta
}

TEST_CASE("parallel evaluation is deterministic") {
  const PrecCtx ctx(128);
  const TraceRequest req{{1, 1}, 47, 1, 6, {ClosedForm::Gamma0_6_F}};
  const std::string serial = to_json(trace(req, ctx, {1, nullptr})).dump();
  const std::string parallel = to_json(trace(req, ctx, {8, nullptr})).dump();
  CHECK(serial == parallel);
}

TEST_CASE("cache transparency") {
  const PrecCtx ctx(128);
  TempFile tmp("cmtrace_test_cache.json");
  const TraceRequest req = mock(-47, 5);
  TraceCache cold_cache(tmp.path.string());
  const TraceReport cold = trace(req, ctx, {1, &cold_cache});
  CHECK_FALSE(cold.from_cache);
  CHECK(std::filesystem::exists(tmp.path));

  TraceCache warm_cache(tmp.path.string());
  const TraceReport warm = trace(req, ctx, {1, &warm_cache});
  CHECK(warm.from_cache);
  CHECK(to_json(warm).dump() == to_json(cold).dump());
  CHECK(to_json(trace(req, ctx)).dump() == to_json(cold).dump());

  CHECK(cache_key(req, ctx) != cache_key(req, PrecCtx(192)));
  TraceRequest other = req;
  other.h = 7;
  CHECK(cache_key(req, ctx) != cache_key(other, ctx));
  other.h = 5 + 12;
  CHECK(cache_key(req, ctx) == cache_key(other, ctx));

  // A second entry merges into the same file.
  trace(mock(-47, 7), ctx, {1, &warm_cache});
  std::ifstream in(tmp.path);
  CHECK(nlohmann::json::parse(in).size() == 2);
}

TEST_CASE("corrupt cache is reported") {
  TempFile tmp("cmtrace_test_bad_cache.json");
  std::ofstream(tmp.path) << "[1, 2";
  TraceCache cache(tmp.path.string());
  CHECK_THROWS_AS(cache.lookup("x"), ConfigError);
}

TEST_CASE("duality residuals") {
  const PrecCtx ctx(128);
  const prec_t wp = ctx.working();
  const TwistParams tw{-23, 1};

  const DualityResult empty = duality_residual({}, PoincareCombo{}, tw, 0, ctx);
  CHECK(empty.residual.re.is_zero());
  CHECK(empty.residual.im.is_zero());

  // Holomorphic part q^{-1/24} f(q) on e1 - e5 + e7 - e11, truncated to what the pairing touches.
  const auto f = mock_theta_coeffs(2);
  std::vector<HarmonicCoeff> H;
  const std::array<std::int64_t, 4> hs{1, 5, 7, 11};
  const std::array<int, 4> sg{1, -1, 1, -1};
  for (int i = 0; i < 4; ++i) {
    H.push_back({BigRational(-1, 24), hs[i], BigRational(sg[i])});
    H.push_back({BigRational(23, 24), hs[i], BigRational(BigInt(f[1] * sg[i]))});
  }
  PoincareCombo combo;
  const std::array<std::int64_t, 4> words{1, 2, 3, 6};
  const std::array<long, 4> csg{1, 1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    PoincareSpec sp;
    sp.m = 1;
    sp.s = 1.0;
    sp.N = 6;
    sp.al_word = words[i];
    combo.terms.push_back({Complex(Real(csg[i], wp)), sp});
  }
  const DualityResult r = duality_residual(H, combo, tw, 0, ctx, {}, FormSpec{ClosedForm::Gamma0_6_F});
  CHECK(abs(r.residual) < r.scale * Real(1e-10, wp));
  CHECK(abs(r.lhs.im + sqrt(Real(23L, wp)) * 8) < pow2(-100, wp));

  std::vector<HarmonicCoeff> zeros = H;
  for (auto& c : zeros) c.value = 0;
  const DualityResult z = duality_residual(zeros, combo, tw, 0, ctx, {}, FormSpec{ClosedForm::Gamma0_6_F});
  CHECK(z.residual.re.is_zero());
  CHECK(z.residual.im.is_zero());
}

TEST_CASE("eta^-25 lift principal part and trace ratio") {
  const PrecCtx ctx(256);
  const prec_t wp = ctx.working();
  const PoincareCombo combo = eta25_combo(wp);
  const TwistParams tw{1, 1};

  // 2 C (q^{-25/24} + 25 q^{-1/24}) (e1 - e5 - e7 + e11)
  const Complex co = lift_constants(13, 14.0, 6, 1, tw, ctx) * 2L;
  std::vector<PrincipalTerm> expected;
  const std::array<std::int64_t, 4> hs{1, 5, 7, 11};
  const std::array<long, 4> sg{1, -1, -1, 1};
  for (int i = 0; i < 4; ++i) {
    expected.push_back({BigRational(-25, 24), hs[i], co * sg[i]});
    expected.push_back({BigRational(-1, 24), hs[i], co * (25 * sg[i])});
  }
  const auto [diff, scale] = principal_part_residual(lift_principal_part(combo, tw, 13, ctx), expected, wp);
  CHECK(diff < scale * Real(1e-30, wp));

  // coefficient * (24n - 1)^7 * pi^13 / trace is 2^-27 for every n.
  const IntSeries eta = eta_power_coeffs(-25, 3);
  for (const std::int64_t n : {1, 2}) {
    const TraceReport r = trace({tw, 24 * n - 1, 1, 6, {combo}}, ctx);
    CHECK(r.truncation < abs(r.value) * Real(1e-20, wp));
    const Real ratio = Real(eta[n + 1].str(), wp) * pow(Real(24 * n - 1, wp), 7L) * pow(pi(wp), 13L) / r.value.re;
    CHECK_MESSAGE(abs(ratio * pow2(27, wp) - 1) < Real(1e-20, wp), "n=", n);
  }
}
