#include "cmtrace/checks.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "cmtrace/errors.hpp"
#include "cmtrace/parallel.hpp"
#include "cmtrace/qseries.hpp"

namespace cmtrace {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kEtaTolerance = 1e-6;
constexpr double kTolerance = 1e-10;
constexpr prec_t kEtaPrec = 256;
constexpr prec_t kPrec = 128;

int digits_for(prec_t prec) { return static_cast<int>(std::floor(static_cast<double>(prec) * 0.30103)); }

std::string dec(const Real& x, prec_t prec) { return x.to_string(digits_for(prec)); }

std::string dec(const Complex& z, prec_t prec) {
  if (z.im.is_zero()) return dec(z.re, prec);
  const std::string im = dec(abs(z.im), prec);
  return dec(z.re, prec) + (z.im.sign() < 0 ? "-" : "+") + im + "i";
}

Complex from_int(const BigInt& n, prec_t wp) { return Complex(Real(n.str(), wp)); }

struct Setup {
  PrecCtx ctx;
  double tol;
  std::unique_ptr<TraceCache> cache;
  Clock::time_point start = Clock::now();

  TraceOptions opts(int jobs) { return {jobs, cache.get()}; }
};

Setup setup(const RunConfig& cfg, bool eta) {
  cfg.validate();
  Setup s{PrecCtx(cfg.prec_bits.value_or(eta ? kEtaPrec : kPrec)),
          cfg.tolerance.value_or(eta ? kEtaTolerance : kTolerance), nullptr};
  if (!cfg.cache_path.empty()) s.cache = std::make_unique<TraceCache>(cfg.cache_path);
  return s;
}

// Fills the residual fields; relative to |lhs| unless lhs is zero.
void finish(CheckReport& r, Setup& s, const Complex& lhs, const Complex& rhs, const std::optional<Real>& scale = {}) {
  const prec_t p = s.ctx.prec_bits;
  const Real diff = abs(lhs - rhs);
  Real rel = diff;
  if (scale) {
    if (!scale->is_zero()) rel = diff / *scale;
  } else if (!abs(lhs).is_zero()) {
    rel = diff / abs(lhs);
  }
  if (r.lhs.empty()) r.lhs = dec(lhs, p);
  r.rhs = dec(rhs, p);
  r.abs_residual = diff.to_string(6);
  r.rel_residual = rel.to_string(6);
  r.pass = rel.to_double() <= s.tol;
  r.prec_bits = p;
  r.tolerance = s.tol;
  r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - s.start).count();
}

PoincareCombo al_combo(std::int64_t m, double s, int k, const std::array<long, 4>& signs, const Complex& scale,
                       double term_floor, std::optional<std::int64_t> c_max) {
  PoincareCombo c;
  const std::array<std::int64_t, 4> words{1, 2, 3, 6};
  for (int i = 0; i < 4; ++i) {
    PoincareSpec sp;
    sp.m = m;
    sp.s = s;
    sp.k = k;
    sp.N = 6;
    sp.al_word = words[i];
    sp.term_floor = term_floor;
    sp.c_max = c_max;
    c.terms.push_back({scale * signs[i], sp});
  }
  return c;
}

// F + F~: -F5 + F5|W2 + F5|W3 - F5|W6 and (25 + 5^13)(F1 - F1|W2 - F1|W3 + F1|W6)
// at s = 14, weight -26.
PoincareCombo eta25_combo(const Setup& s, std::optional<std::int64_t> c_max) {
  const prec_t wp = s.ctx.working();
  // The tail only has to sit far below the tolerance, not below 2^-prec.
  const double floor = s.tol * 1e-30;
  const Complex one(Real(1L, wp));
  const Complex factor(Real(25L, wp) + pow(Real(5L, wp), 13L));
  PoincareCombo all = al_combo(5, 14.0, -26, {-1, 1, 1, -1}, one, floor, c_max);
  for (const auto& t : al_combo(1, 14.0, -26, {1, -1, -1, 1}, factor, floor, c_max).terms) all.terms.push_back(t);
  return all;
}

struct Eta25Data {
  BigInt coeff;
  TraceReport trace;
  Real ratio;  // coeff (24n-1)^7 / Re trace
};

Eta25Data eta25_data(std::int64_t n, Setup& s, const RunConfig& cfg) {
  if (n < 1) throw ConfigError("eta25: n must be >= 1");
  const prec_t wp = s.ctx.working();
  Eta25Data out{eta_power_coeffs(-25, static_cast<std::size_t>(n + 1))[static_cast<std::size_t>(n + 1)],
                trace({{1, 1}, 24 * n - 1, 1, 6, {eta25_combo(s, cfg.c_max)}}, s.ctx, s.opts(cfg.jobs)), Real(wp)};
  out.ratio = Real(out.coeff.str(), wp) * pow(Real(24 * n - 1, wp), 7L) / Real(out.trace.value.re, wp);
  return out;
}

// -185725 / 4429185024, the printed constant without pi^-13.
Real printed_constant(prec_t wp) { return Real(-185725L, wp) / Real(4429185024L, wp); }

}  // namespace

Format format_from_string(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "text") return Format::Text;
  throw ConfigError("unknown format: " + s);
}

void RunConfig::validate() const {
  if (prec_bits && *prec_bits < 64) throw ConfigError("prec_bits must be >= 64");
  if (tolerance && !(*tolerance > 0)) throw ConfigError("tolerance must be > 0");
  if (c_max && *c_max < 0) throw ConfigError("c_max must be >= 0");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

json to_json(const CheckReport& r, bool timing) {
  json j{{"check", r.check},
         {"inputs", r.inputs},
         {"lhs", r.lhs},
         {"rhs", r.rhs},
         {"abs_residual", r.abs_residual},
         {"rel_residual", r.rel_residual},
         {"pass", r.pass},
         {"tolerance", r.tolerance},
         {"prec_bits", r.prec_bits},
         {"c_max", r.c_max ? json(*r.c_max) : json(nullptr)},
         {"diagnostics", r.diagnostics}};
  if (timing) j["wall_ms"] = std::round(r.wall_ms * 1000) / 1000;
  return j;
}

CheckReport cmd_mock_theta(std::int64_t delta, const RunConfig& cfg) {
  if (delta >= 0 || !is_fundamental_discriminant(delta) || mod(delta, 24) != 1)
    throw InvalidDiscriminant("mock-theta: delta must be a negative fundamental discriminant = 1 mod 24");
  Setup s = setup(cfg, false);
  const prec_t wp = s.ctx.working();
  CheckReport r;
  r.check = "mock_theta";
  r.inputs = {{"delta", delta}};

  const auto n = static_cast<std::size_t>((-delta + 1) / 24);
  const BigInt af = mock_theta_coeffs(n)[n];
  TraceSession session(s.ctx, s.opts(cfg.jobs));
  const std::array<std::int64_t, 4> hs{1, 5, 7, 11};
  const std::array<long, 4> signs{1, -1, 1, -1};
  Complex T(wp);
  json traces = json::object();
  for (int i = 0; i < 4; ++i) {
    const TraceReport tr = session.trace({{delta, 1}, 1, hs[i], 6, {ClosedForm::Gamma0_6_F}});
    traces[std::to_string(hs[i])] = {{"value", dec(tr.value, s.ctx.prec_bits)}, {"classes", tr.rows.size()}};
    T += tr.value * signs[i];
  }
  // -1/(8 i sqrt|delta|) T = i T / (8 sqrt|delta|)
  const Complex rhs = Complex(-T.im, T.re) / (sqrt(Real(-delta, wp)) * 8L);
  r.lhs = af.str();
  r.diagnostics = {{"traces", traces}, {"index", n}};
  finish(r, s, from_int(af, wp), rhs);
  return r;
}

CheckReport cmd_eta25(std::int64_t n, const RunConfig& cfg) {
  Setup s = setup(cfg, true);
  const prec_t wp = s.ctx.working();
  const prec_t p = s.ctx.prec_bits;
  CheckReport r;
  r.check = "eta25";
  r.inputs = {{"n", n}};
  r.c_max = cfg.c_max;

  const Eta25Data e = eta25_data(n, s, cfg);
  const Real pi13 = pow(pi(wp), 13L);
  const Real dpow = pow(Real(24 * n - 1, wp), 7L);
  const Complex rhs = e.trace.value * (printed_constant(wp) / (pi13 * dpow));
  r.lhs = e.coeff.str();
  r.diagnostics = {{"d", 24 * n - 1},
                   {"trace", dec(e.trace.value, p)},
                   {"trace_truncation", e.trace.truncation.to_string(6)},
                   {"classes", e.trace.rows.size()},
                   {"ratio", dec(e.ratio, p)},
                   {"ratio_times_pi13", dec(e.ratio * pi13, p)},
                   {"printed_constant_times_pi13", dec(printed_constant(wp), p)},
                   {"ratio_over_printed", dec(e.ratio * pi13 / printed_constant(wp), p)},
                   {"ratio_times_pi13_times_2pow27", dec(e.ratio * pi13 * pow2(27, wp), p)}};
  finish(r, s, from_int(e.coeff, wp), rhs);
  return r;
}

CheckReport cmd_eta25_ratio(std::int64_t n1, std::int64_t n2, const RunConfig& cfg) {
  Setup s = setup(cfg, true);
  CheckReport r;
  r.check = "eta25_ratio";
  r.inputs = {{"n1", n1}, {"n2", n2}};
  r.c_max = cfg.c_max;
  const Eta25Data a = eta25_data(n1, s, cfg);
  const Eta25Data b = eta25_data(n2, s, cfg);
  const Real pi13 = pow(pi(s.ctx.working()), 13L);
  r.diagnostics = {{"ratio_times_pi13", {dec(a.ratio * pi13, s.ctx.prec_bits), dec(b.ratio * pi13, s.ctx.prec_bits)}}};
  finish(r, s, Complex(a.ratio), Complex(b.ratio));
  return r;
}

CheckReport cmd_zagier(std::int64_t d, const RunConfig& cfg) {
  if (d <= 0 || (mod(d, 4) != 0 && mod(d, 4) != 3))
    throw InvalidDiscriminant("zagier: d must be positive and = 0 or 3 mod 4");
  Setup s = setup(cfg, false);
  const prec_t wp = s.ctx.working();
  CheckReport r;
  r.check = "zagier";
  r.inputs = {{"d", d}};
  const TraceReport tr = trace({{1, 1}, d, d % 2, 1, {ClosedForm::J}, SignMode::PositiveOnly}, s.ctx, s.opts(cfg.jobs));
  const Real nearest = round(tr.value.re);
  r.lhs = std::to_string(nearest.to_long());
  r.diagnostics = {{"classes", tr.rows.size()},
                   {"distance_to_integer", abs(tr.value.re - nearest).to_string(6)},
                   {"label", "integrality of traces of a weakly holomorphic form with integer coefficients"}};
  finish(r, s, Complex(Real(nearest, wp)), tr.value);
  return r;
}

CheckReport cmd_duality(const std::string& instance, const RunConfig& cfg) {
  if (instance != "mock_theta" && instance != "eta25" && instance != "empty")
    throw ConfigError("duality: unknown instance " + instance);
  Setup s = setup(cfg, false);
  const prec_t wp = s.ctx.working();
  CheckReport r;
  r.check = "duality";
  r.inputs = {{"instance", instance}};

  if (instance == "empty") {
    const DualityResult d = duality_residual({}, PoincareCombo{}, {1, 1}, 0, s.ctx, s.opts(cfg.jobs));
    finish(r, s, d.lhs, d.rhs, d.scale);
    return r;
  }

  if (instance == "mock_theta") {
    // q^{-1/24} f(q) (e1 - e5 + e7 - e11): principal part and the q^{23/24} term.
    const TwistParams tw{-23, 1};
    const BigInt af1 = mock_theta_coeffs(1)[1];
    std::vector<HarmonicCoeff> H;
    const std::array<std::int64_t, 4> hs{1, 5, 7, 11};
    const std::array<int, 4> sg{1, -1, 1, -1};
    for (int i = 0; i < 4; ++i) {
      H.push_back({BigRational(-1, 24), hs[i], BigRational(sg[i])});
      H.push_back({BigRational(23, 24), hs[i], BigRational(BigInt(af1 * sg[i]))});
    }
    const PoincareCombo combo = al_combo(1, 1.0, 0, {1, 1, -1, -1}, Complex(Real(1L, wp)), 0.0, cfg.c_max);
    const DualityResult d =
        duality_residual(H, combo, tw, 0, s.ctx, s.opts(cfg.jobs), FormSpec{ClosedForm::Gamma0_6_F});
    r.diagnostics = {{"scale", d.scale.to_string(6)}};
    finish(r, s, d.lhs, d.rhs, d.scale);
    return r;
  }

  // eta25: the lift's principal part against 2C (q^{-25/24} + 25 q^{-1/24}) (e1 - e5 - e7 + e11).
  const TwistParams tw{1, 1};
  const auto lift = lift_principal_part(eta25_combo(s, cfg.c_max), tw, 13, s.ctx);
  const Complex co = lift_constants(13, 14.0, 6, 1, tw, s.ctx) * 2L;
  std::vector<PrincipalTerm> expected;
  const std::array<std::int64_t, 4> hs{1, 5, 7, 11};
  const std::array<long, 4> sg{1, -1, -1, 1};
  for (int i = 0; i < 4; ++i) {
    expected.push_back({BigRational(-25, 24), hs[i], co * sg[i]});
    expected.push_back({BigRational(-1, 24), hs[i], co * (25 * sg[i])});
  }
  const auto [diff, scale] = principal_part_residual(lift, expected, wp);
  Complex lhs(wp);
  for (const auto& t : lift)
    if (t.exponent == BigRational(-1, 24) && t.h == 1) lhs = t.coeff;
  r.diagnostics = {{"terms", lift.size()}, {"scale", scale.to_string(6)}};
  r.lhs = dec(lhs, s.ctx.prec_bits);
  finish(r, s, lhs, expected[1].coeff, scale);
  // The residual covers every term, not only the one displayed.
  r.abs_residual = diff.to_string(6);
  r.rel_residual = (scale.is_zero() ? diff : diff / scale).to_string(6);
  r.pass = (scale.is_zero() ? diff : diff / scale).to_double() <= s.tol;
  return r;
}

std::vector<CheckReport> run_all(const RunConfig& cfg) {
  cfg.validate();
  RunConfig inner = cfg;
  inner.jobs = 1;
  std::vector<std::function<CheckReport()>> battery;
  for (const std::int64_t delta : {-23, -47, -71, -95}) battery.push_back([=] { return cmd_mock_theta(delta, inner); });
  for (const std::int64_t n : {1, 2}) battery.push_back([=] { return cmd_eta25(n, inner); });
  battery.push_back([=] { return cmd_eta25_ratio(1, 2, inner); });
  for (const std::int64_t d : {3, 4, 7, 8, 11, 12, 15}) battery.push_back([=] { return cmd_zagier(d, inner); });
  for (const char* inst : {"mock_theta", "eta25"}) battery.push_back([=] { return cmd_duality(inst, inner); });

  std::vector<CheckReport> out(battery.size());
  parallel_for(battery.size(), cfg.jobs, [&](std::size_t i) { out[i] = battery[i](); });
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string render(const std::vector<CheckReport>& reports, Format format, bool timing) {
  std::ostringstream os;
  switch (format) {
    case Format::Json: {
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(to_json(r, timing));
      os << arr.dump(2) << '\n';
      break;
    }
    case Format::Csv: {
      os << "check,inputs,lhs,rhs,abs_residual,rel_residual,pass,prec_bits,c_max";
      if (timing) os << ",wall_ms";
      os << '\n';
      for (const auto& r : reports) {
        os << r.check << ',' << csv_field(r.inputs.dump()) << ',' << csv_field(r.lhs) << ',' << csv_field(r.rhs) << ','
           << r.abs_residual << ',' << r.rel_residual << ',' << (r.pass ? "true" : "false") << ',' << r.prec_bits
           << ',' << (r.c_max ? std::to_string(*r.c_max) : "");
        if (timing) os << ',' << to_json(r, true)["wall_ms"].dump();
        os << '\n';
      }
      break;
    }
    case Format::Text:
      for (const auto& r : reports) {
        os << (r.pass ? "PASS " : "FAIL ") << r.check << ' ' << r.inputs.dump() << "  lhs=" << r.lhs
           << "  rhs=" << r.rhs << "  rel=" << r.rel_residual << "  tol=" << r.tolerance;
        if (timing) os << "  " << to_json(r, true)["wall_ms"].dump() << "ms";
        os << '\n';
      }
      break;
  }
  return os.str();
}

}  // namespace cmtrace
