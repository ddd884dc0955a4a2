#include "cmtrace/quadforms.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "cmtrace/errors.hpp"

namespace cmtrace {

std::string QuadForm::str() const {
  std::ostringstream os;
  os << '[' << a << ',' << b << ',' << c << ']';
  return os.str();
}

std::string Mat2::str() const {
  std::ostringstream os;
  os << '(' << a << ',' << b << ';' << c << ',' << d << ')';
  return os.str();
}

QuadForm transform(const QuadForm& q, const Mat2& g) {
  // Q(ax + by, cx + dy)
  const std::int64_t A = q.value(g.a, g.c);
  const std::int64_t C = q.value(g.b, g.d);
  const std::int64_t B = 2 * q.a * g.a * g.b + q.b * (g.a * g.d + g.b * g.c) + 2 * q.c * g.c * g.d;
  return {A, B, C};
}

Complex heegner_point(const QuadForm& q, const PrecCtx& ctx) {
  const prec_t wp = ctx.working();
  const Real two_a(2 * q.a, wp);
  Real im = sqrt(Real(-q.disc(), wp)) / two_a;
  if (q.a < 0) im = -im;
  return {Real(-q.b, wp) / two_a, im};
}

Reduction sl2_reduce(const QuadForm& q) {
  if (q.a <= 0 || q.disc() >= 0) throw Error("sl2_reduce: form is not positive definite: " + q.str());
  QuadForm f = q;
  Mat2 g;
  for (;;) {
    // Translate b into (-a, a].
    const std::int64_t k = floor_div(f.a - f.b, 2 * f.a);
    if (k != 0) {
      f = transform(f, Mat2::T(k));
      g = g * Mat2::T(k);
    }
    if (f.a > f.c || (f.a == f.c && f.b < 0)) {
      f = transform(f, Mat2::S());
      g = g * Mat2::S();
      continue;
    }
    return {f, g};
  }
}

std::vector<Mat2> automorphs(const QuadForm& q) {
  const std::int64_t g = q.content();
  const QuadForm p{q.a / g, q.b / g, q.c / g};
  const std::int64_t D = -p.disc();
  std::vector<Mat2> out;
  for (std::int64_t u = -2; u <= 2; ++u) {
    for (std::int64_t t = -2; t <= 2; ++t) {
      if (t * t + D * u * u != 4 || (t - p.b * u) % 2 != 0) continue;
      const Mat2 m{(t - p.b * u) / 2, -p.c * u, p.a * u, (t + p.b * u) / 2};
      if (transform(p, m) == p) out.push_back(m);
    }
  }
  return out;
}

int automorph_order(const QuadForm& q) {
  return static_cast<int>(automorphs(q).size());
}

namespace {

void check_compatible(const QuadForm& q1, const QuadForm& q2) {
  if (q1.disc() != q2.disc()) throw DiscMismatch("gamma0_equivalent: " + q1.str() + " vs " + q2.str());
  if ((q1.a > 0) != (q2.a > 0)) throw DiscMismatch("gamma0_equivalent: definiteness differs");
}

QuadForm positive_part(const QuadForm& q) { return q.a < 0 ? q.negated() : q; }

}  // namespace

std::optional<Mat2> gamma0_equivalent(const QuadForm& q1, const QuadForm& q2, std::int64_t N) {
  check_compatible(q1, q2);
  const Reduction r1 = sl2_reduce(positive_part(q1));
  const Reduction r2 = sl2_reduce(positive_part(q2));
  if (r1.reduced != r2.reduced) return std::nullopt;
  const Mat2 g2inv = r2.g.inverse();
  for (const Mat2& alpha : automorphs(r1.reduced)) {
    const Mat2 w = r1.g * alpha * g2inv;
    if (w.in_gamma0(N)) return w;
  }
  return std::nullopt;
}

int gamma0_stabilizer_order(const QuadForm& q, std::int64_t N) {
  const Reduction r = sl2_reduce(positive_part(q));
  const Mat2 ginv = r.g.inverse();
  int count = 0;
  for (const Mat2& alpha : automorphs(r.reduced))
    if ((r.g * alpha * ginv).in_gamma0(N)) ++count;
  return count / 2;
}

std::string to_string(SignMode m) { return m == SignMode::Both ? "both" : "positive_only"; }

SignMode sign_mode_from_string(const std::string& s) {
  if (s == "both") return SignMode::Both;
  if (s == "positive_only") return SignMode::PositiveOnly;
  throw ConfigError("unknown sign mode: " + s);
}

void to_json(nlohmann::json& j, const ClassSet& cs) {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : cs.reps)
    reps.push_back({{"a", r.form.a}, {"b", r.form.b}, {"c", r.form.c}, {"stab", r.stabilizer}});
  j = nlohmann::json{{"D", cs.D},           {"rho", cs.rho},     {"N", cs.N},
                     {"sign_mode", to_string(cs.sign_mode)}, {"a_max", cs.a_max}, {"reps", reps}};
}

void from_json(const nlohmann::json& j, ClassSet& cs) {
  cs.D = j.at("D").get<std::int64_t>();
  cs.rho = j.at("rho").get<std::int64_t>();
  cs.N = j.at("N").get<std::int64_t>();
  cs.sign_mode = sign_mode_from_string(j.at("sign_mode").get<std::string>());
  cs.a_max = j.at("a_max").get<std::int64_t>();
  cs.reps.clear();
  for (const auto& r : j.at("reps"))
    cs.reps.push_back({{r.at("a").get<std::int64_t>(), r.at("b").get<std::int64_t>(), r.at("c").get<std::int64_t>()},
                       r.at("stab").get<int>()});
}

namespace {

struct Found {
  QuadForm form;
  std::int64_t first_a;
};

// Positive forms with N | a <= limit, b = rho (mod 2N), one per Gamma0(N)-class,
// in order of first appearance.
std::vector<Found> positive_classes(std::int64_t D, std::int64_t rho, std::int64_t N, std::int64_t limit) {
  std::vector<Found> found;
  std::map<QuadForm, std::vector<std::size_t>> by_reduced;
  const std::int64_t M = 2 * N;
  for (std::int64_t a = N; a <= limit; a += N) {
    // Smallest b > -a with b = rho (mod 2N).
    std::int64_t b = -a + 1 + mod(rho - (-a + 1), M);
    for (; b <= a; b += M) {
      const std::int64_t num = b * b + D;
      if (num % (4 * a) != 0) continue;
      const QuadForm q{a, b, num / (4 * a)};
      const QuadForm red = sl2_reduce(q).reduced;
      auto& bucket = by_reduced[red];
      bool seen = false;
      for (const std::size_t idx : bucket) {
        if (gamma0_equivalent(found[idx].form, q, N)) {
          seen = true;
          break;
        }
      }
      if (!seen) {
        bucket.push_back(found.size());
        found.push_back({q, a});
      }
    }
  }
  return found;
}

}  // namespace

ClassSet enumerate_classes(std::int64_t D, std::int64_t rho, std::int64_t N, SignMode mode, std::int64_t a_max) {
  if (D <= 0 || N <= 0) throw ConfigError("enumerate_classes: need D > 0 and N > 0");
  if (mod(rho * rho + D, 4 * N) != 0) throw ConfigError("enumerate_classes: rho^2 != -D (mod 4N)");
  if (a_max <= 0) a_max = N * (D + 4);

  ClassSet cs;
  cs.D = D;
  cs.rho = mod(rho, 2 * N);
  cs.N = N;
  cs.sign_mode = mode;
  cs.a_max = a_max;

  auto collect = [&](std::int64_t residue, bool negate) {
    // Searching to 2*a_max in one pass; any class first seen beyond a_max
    // means the default bound would have missed it.
    for (const Found& f : positive_classes(D, residue, N, 2 * a_max)) {
      if (f.first_a > a_max)
        throw BoundUnstable("enumerate_classes: class " + f.form.str() + " first appears beyond a_max=" +
                            std::to_string(a_max));
      const QuadForm q = negate ? f.form.negated() : f.form;
      cs.reps.push_back({q, gamma0_stabilizer_order(q, N)});
    }
  };
  collect(rho, false);
  if (mode == SignMode::Both) collect(-rho, true);

  const std::int64_t M = 2 * N;
  std::sort(cs.reps.begin(), cs.reps.end(), [M](const ClassRep& x, const ClassRep& y) {
    auto key = [M](const QuadForm& q) {
      return std::tuple(q.a < 0 ? -q.a : q.a, q.a < 0 ? -1 : 1, mod(q.b, M), q.c, q.b);
    };
    return key(x.form) < key(y.form);
  });
  return cs;
}

void TwistParams::validate(std::int64_t N) const {
  if (!is_fundamental_discriminant(delta))
    throw ConfigError("twist: " + std::to_string(delta) + " is not a fundamental discriminant");
  if (mod(r * r - delta, 4 * N) != 0) throw ConfigError("twist: r^2 != delta (mod 4N)");
}

bool is_square_mod(std::int64_t n, std::int64_t m) {
  const std::int64_t t = mod(n, m);
  for (std::int64_t x = 0; x < m; ++x)
    if (mod(x * x, m) == t) return true;
  return false;
}

namespace {

bool admissible(const QuadForm& q, std::int64_t delta, std::int64_t N) {
  const std::int64_t disc = q.disc();
  if (disc % delta != 0) return false;
  if (!is_square_mod(disc / delta, 4 * N)) return false;
  return gcd(q.content(), delta) == 1;
}

}  // namespace

int genus_char(const QuadForm& q, const TwistParams& tw, std::int64_t N, std::int64_t search_bound) {
  if (tw.delta == 1) return 1;
  if (!admissible(q, tw.delta, N)) return 0;
  std::int64_t bound = search_bound;
  for (int attempt = 0; attempt < 4; ++attempt, bound *= 4) {
    std::int64_t best = 0;
    for (std::int64_t x = -bound; x <= bound; ++x) {
      for (std::int64_t y = -bound; y <= bound; ++y) {
        const std::int64_t n = q.value(x, y);
        if (n == 0 || gcd(n, tw.delta) != 1) continue;
        if (best == 0 || std::abs(n) < std::abs(best)) best = n;
      }
    }
    if (best != 0) return kronecker(tw.delta, best);
  }
  throw NoRepresentativeFound("genus_char: no value coprime to delta represented by " + q.str());
}

int genus_char_gkz(const QuadForm& q, const TwistParams& tw, std::int64_t N) {
  if (tw.delta == 1) return 1;
  if (!admissible(q, tw.delta, N)) return 0;
  // Attached N|c form [a', b', N c'] = [c, -b, a].
  const std::int64_t ap = q.c;
  const std::int64_t cp = q.a / N;
  auto is_disc = [](std::int64_t d) { return mod(d, 4) == 0 || mod(d, 4) == 1; };
  for (const std::int64_t dd : divisors(tw.delta)) {
    for (const std::int64_t d1 : {dd, -dd}) {
      if (tw.delta % d1 != 0) continue;
      const std::int64_t d2 = tw.delta / d1;
      if (!is_disc(d1) || !is_disc(d2)) continue;
      for (const std::int64_t n1 : divisors(N)) {
        const std::int64_t n2 = N / n1;
        if (gcd(d1, n1 * ap) != 1 || gcd(d2, n2 * cp) != 1) continue;
        return kronecker(d1, n1 * ap) * kronecker(d2, n2 * cp);
      }
    }
  }
  return 0;
}

}  // namespace cmtrace
