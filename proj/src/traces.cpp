#include "cmtrace/traces.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>

#include "cmtrace/errors.hpp"
#include "cmtrace/modeval.hpp"
#include "cmtrace/parallel.hpp"

namespace cmtrace {

namespace {

using nlohmann::json;

json complex_json(const Complex& z) { return json{{"re", z.re.to_string()}, {"im", z.im.to_string()}}; }

Complex complex_from(const json& j, prec_t prec) {
  return {Real(j.at("re").get<std::string>(), prec), Real(j.at("im").get<std::string>(), prec)};
}

Complex to_complex(const BigRational& q, prec_t wp) {
  Real r = Real(numerator(q).str(), wp) / Real(denominator(q).str(), wp);
  return Complex(r);
}

std::string sha256_hex(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// df at a CM point, with its truncation estimate.
std::pair<Complex, Real> evaluate(const FormSpec& f, const Complex& alpha, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  if (const auto* cf = std::get_if<ClosedForm>(&f.f)) {
    const Complex v = *cf == ClosedForm::J ? J(alpha, ctx) : gamma0_6_F(alpha, ctx);
    return {v, Real(wp)};
  }
  const PoincareValue v = eval_dF(std::get<PoincareCombo>(f.f), alpha, ctx, 1);
  return {v.value, v.truncation};
}

}  // namespace

std::int64_t FormSpec::level() const {
  if (const auto* cf = std::get_if<ClosedForm>(&f)) return *cf == ClosedForm::J ? 1 : 6;
  const auto& combo = std::get<PoincareCombo>(f);
  return combo.terms.empty() ? 0 : combo.terms.front().spec.N;
}

int FormSpec::raise_count() const {
  if (std::holds_alternative<ClosedForm>(f)) return 0;
  return std::get<PoincareCombo>(f).raise_count();
}

json FormSpec::canonical() const {
  if (const auto* cf = std::get_if<ClosedForm>(&f)) return *cf == ClosedForm::J ? "J" : "gamma0_6_F";
  json terms = json::array();
  for (const PoincareTerm& t : std::get<PoincareCombo>(f).terms) {
    const PoincareSpec& s = t.spec;
    terms.push_back({{"coeff", complex_json(t.coeff)},
                     {"m", s.m},
                     {"s", s.s},
                     {"k", s.k},
                     {"N", s.N},
                     {"al_word", s.al_word},
                     {"c_max", s.c_max ? json(*s.c_max) : json(nullptr)},
                     {"term_floor", s.term_floor}});
  }
  return json{{"poincare", terms}};
}

std::int64_t TraceRequest::disc() const { return d * std::abs(tw.delta); }

void TraceRequest::validate() const {
  if (d <= 0) throw ConfigError("trace: d must be positive");
  if (N <= 0) throw ConfigError("trace: N must be positive");
  tw.validate(N);
  const std::int64_t level = f.level();
  if (level != 0 && level != N) throw ConfigError("trace: form level does not match N");
  const std::int64_t sg = tw.delta > 0 ? 1 : -1;
  if (!is_square_mod(mod(-sg * d, 4 * N), 4 * N)) throw ConfigError("trace: -sgn(delta) d is not a square mod 4N");
  const std::int64_t rho = mod(tw.r * h, 2 * N);
  if (mod(rho * rho + disc(), 4 * N) != 0) throw ConfigError("trace: (r h)^2 != -d|delta| mod 4N");
}

json TraceRequest::canonical(const PrecCtx& ctx) const {
  return json{{"delta", tw.delta},
              {"r", tw.r},
              {"d", d},
              {"h", mod(h, 2 * N)},
              {"N", N},
              {"form", f.canonical()},
              {"sign_mode", to_string(sign_mode)},
              {"prec_bits", ctx.prec_bits},
              {"guard_bits", ctx.guard_bits}};
}

std::string cache_key(const TraceRequest& req, const PrecCtx& ctx) { return sha256_hex(req.canonical(ctx).dump()); }

json to_json(const TraceReport& r) {
  json rows = json::array();
  for (const TraceRow& row : r.rows) {
    rows.push_back({{"a", row.form.a},
                    {"b", row.form.b},
                    {"c", row.form.c},
                    {"chi", row.chi},
                    {"stab", row.stabilizer},
                    {"value", complex_json(row.value)}});
  }
  return json{{"value", complex_json(r.value)},
              {"truncation", r.truncation.to_string()},
              {"prec_bits", r.prec_bits},
              {"key", r.cache_key},
              {"rows", rows}};
}

TraceReport report_from_json(const json& j) {
  TraceReport r;
  r.prec_bits = j.at("prec_bits").get<prec_t>();
  r.value = complex_from(j.at("value"), r.prec_bits);
  r.truncation = Real(j.at("truncation").get<std::string>(), r.prec_bits);
  r.cache_key = j.at("key").get<std::string>();
  for (const json& row : j.at("rows")) {
    TraceRow t;
    t.form = {row.at("a").get<std::int64_t>(), row.at("b").get<std::int64_t>(), row.at("c").get<std::int64_t>()};
    t.chi = row.at("chi").get<int>();
    t.stabilizer = row.at("stab").get<int>();
    t.value = complex_from(row.at("value"), r.prec_bits);
    r.rows.push_back(std::move(t));
  }
  return r;
}

TraceCache::TraceCache(std::string path) : path_(std::move(path)) {}

json TraceCache::read_file() const {
  std::ifstream in(path_);
  if (!in) return json::object();
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("cache file is not a JSON object: " + path_);
  return j;
}

std::optional<json> TraceCache::lookup(const std::string& key) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!loaded_) {
    entries_ = read_file();
    loaded_ = true;
  }
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return *it;
}

void TraceCache::store(const std::string& key, const json& entry) {
  static std::atomic<unsigned> counter{0};
  std::lock_guard<std::mutex> lock(mutex_);
  json merged = read_file();
  if (loaded_) merged.update(entries_);
  merged[key] = entry;
  const std::string tmp = path_ + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write cache file: " + tmp);
    out << merged.dump(1) << '\n';
    if (!out) throw ConfigError("cannot write cache file: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot replace cache file " + path_ + ": " + ec.message());
  }
  entries_ = std::move(merged);
  loaded_ = true;
}

const ClassSet& TraceSession::classes(std::int64_t D, std::int64_t rho, std::int64_t N, SignMode mode) {
  const auto key = std::make_tuple(D, rho, N, mode);
  auto it = class_sets_.find(key);
  if (it == class_sets_.end()) it = class_sets_.emplace(key, enumerate_classes(D, rho, N, mode)).first;
  return it->second;
}

TraceReport TraceSession::trace(const TraceRequest& req) {
  req.validate();
  const prec_t wp = ctx_.working();
  const std::string key = cache_key(req, ctx_);
  if (opts_.cache) {
    if (auto hit = opts_.cache->lookup(key)) {
      TraceReport r = report_from_json(*hit);
      r.from_cache = true;
      return r;
    }
  }

  const ClassSet& cs = classes(req.disc(), mod(req.tw.r * req.h, 2 * req.N), req.N, req.sign_mode);
  const std::string label = req.f.canonical().dump();
  auto memo_key = [&](const QuadForm& q) {
    const QuadForm p = q.positive() ? q : q.negated();
    return std::make_pair(label, std::make_tuple(p.a, p.b, p.c));
  };

  TraceReport report;
  report.prec_bits = ctx_.prec_bits;
  report.cache_key = key;
  std::vector<QuadForm> pending;
  for (const ClassRep& rep : cs.reps) {
    TraceRow row{rep.form, genus_char(rep.form, req.tw, req.N), rep.stabilizer, Complex(wp)};
    if (row.chi != 0 && !values_.count(memo_key(rep.form))) {
      const QuadForm p = rep.form.positive() ? rep.form : rep.form.negated();
      if (std::find(pending.begin(), pending.end(), p) == pending.end()) pending.push_back(p);
    }
    report.rows.push_back(std::move(row));
  }

  std::vector<std::pair<Complex, Real>> fresh(pending.size(), {Complex(wp), Real(wp)});
  parallel_for(pending.size(), opts_.jobs,
               [&](std::size_t i) { fresh[i] = evaluate(req.f, heegner_point(pending[i], ctx_), ctx_); });
  for (std::size_t i = 0; i < pending.size(); ++i) values_.emplace(memo_key(pending[i]), fresh[i]);

  CompensatedSum<Complex> acc(wp);
  Real trunc(wp);
  for (TraceRow& row : report.rows) {
    if (row.chi == 0) {
      row.value = Complex(ctx_.prec_bits);
      continue;
    }
    const auto& [v, t] = values_.at(memo_key(row.form));
    acc.add(v * static_cast<long>(row.chi) / static_cast<long>(row.stabilizer));
    trunc += t / static_cast<long>(row.stabilizer);
    row.value = v.rounded(ctx_.prec_bits);
  }
  report.value = acc.value().rounded(ctx_.prec_bits);
  report.truncation = Real(trunc, ctx_.prec_bits);

  if (opts_.cache) opts_.cache->store(key, to_json(report));
  return report;
}

Complex TraceSession::trace_combination(const std::vector<std::pair<Complex, TraceRequest>>& terms) {
  const prec_t wp = ctx_.working();
  if (!terms.empty()) {
    for (const auto& [c, req] : terms)
      if (req.N != terms.front().second.N) throw ConfigError("trace_combination: requests must share N");
  }
  CompensatedSum<Complex> acc(wp);
  for (const auto& [c, req] : terms) acc.add(c * trace(req).value);
  return acc.value().rounded(ctx_.prec_bits);
}

TraceReport trace(const TraceRequest& req, const PrecCtx& ctx, TraceOptions opts) {
  return TraceSession(ctx, opts).trace(req);
}

Complex trace_combination(const std::vector<std::pair<Complex, TraceRequest>>& terms, const PrecCtx& ctx,
                          TraceOptions opts) {
  return TraceSession(ctx, opts).trace_combination(terms);
}

DualityResult duality_residual(const std::vector<HarmonicCoeff>& F_coeffs, const PoincareCombo& combo,
                               const TwistParams& tw, int k, const PrecCtx& ctx, TraceOptions opts,
                               const std::optional<FormSpec>& trace_form) {
  const prec_t wp = ctx.working();
  DualityResult out{Complex(wp), Complex(wp), Complex(wp), Real(wp)};
  const FormSpec f = trace_form ? *trace_form : FormSpec{combo};
  std::int64_t N = f.level();
  if (N == 0 && !combo.terms.empty()) N = combo.terms.front().spec.N;

  TraceSession session(ctx, opts);
  for (const HarmonicCoeff& c : F_coeffs) {
    if (c.index >= 0 || c.value == 0) continue;
    const BigRational dq = -c.index * 4 * N;
    if (denominator(dq) != 1) throw ConfigError("duality_residual: 4N * index is not an integer");
    TraceRequest req{tw, static_cast<std::int64_t>(numerator(dq)), c.h, N, f, SignMode::Both};
    const Complex term = to_complex(c.value, wp) * session.trace(req).value;
    out.scale = std::max(out.scale, abs(term));
    out.lhs += term;
  }

  if (!combo.terms.empty()) {
    for (const PrincipalTerm& t : lift_principal_part(combo, tw, k, ctx)) {
      for (const HarmonicCoeff& c : F_coeffs) {
        if (c.index != -t.exponent || mod(c.h, 2 * N) != mod(t.h, 2 * N) || c.value == 0) continue;
        const Complex term = to_complex(c.value, wp) * t.coeff;
        out.scale = std::max(out.scale, abs(term));
        out.rhs -= term;
      }
    }
  }
  out.residual = out.lhs - out.rhs;
  return out;
}

std::pair<Real, Real> principal_part_residual(const std::vector<PrincipalTerm>& a,
                                              const std::vector<PrincipalTerm>& b, prec_t wp) {
  std::map<std::pair<BigRational, std::int64_t>, std::pair<Complex, Complex>> merged;
  for (const auto& t : a) merged.try_emplace({t.exponent, t.h}, Complex(wp), Complex(wp)).first->second.first += t.coeff;
  for (const auto& t : b)
    merged.try_emplace({t.exponent, t.h}, Complex(wp), Complex(wp)).first->second.second += t.coeff;
  Real diff(wp), scale(wp);
  for (const auto& [key, v] : merged) {
    diff = std::max(diff, abs(v.first - v.second));
    scale = std::max(scale, std::max(abs(v.first), abs(v.second)));
  }
  return {diff, scale};
}

}  // namespace cmtrace
