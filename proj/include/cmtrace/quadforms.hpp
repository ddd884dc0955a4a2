#ifndef CMTRACE_QUADFORMS_HPP
#define CMTRACE_QUADFORMS_HPP

// Definite binary quadratic forms [a, b, c] with level-N structure.
//
// Convention throughout: a form belongs to level N with residue rho when
// N | a and b = rho (mod 2N). The alternative N | c normalization maps onto
// this one by [a, b, c] -> [c, -b, a] and is not exposed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmtrace/numkernel.hpp"

namespace cmtrace {

struct QuadForm {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;

  std::int64_t disc() const { return b * b - 4 * a * c; }
  std::int64_t content() const { return gcd(gcd(a, b), c); }
  bool positive() const { return a > 0; }
  QuadForm negated() const { return {-a, -b, -c}; }
  std::int64_t value(std::int64_t x, std::int64_t y) const { return a * x * x + b * x * y + c * y * y; }
  std::string str() const;

  friend bool operator==(const QuadForm&, const QuadForm&) = default;
  friend auto operator<=>(const QuadForm&, const QuadForm&) = default;
};

/// Integer 2x2 matrix (a b; c d).
struct Mat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  static Mat2 identity() { return {}; }
  static Mat2 T(std::int64_t k = 1) { return {1, k, 0, 1}; }
  static Mat2 S() { return {0, -1, 1, 0}; }

  std::int64_t det() const { return a * d - b * c; }
  /// Inverse of a determinant-one matrix.
  Mat2 inverse() const { return {d, -b, -c, a}; }
  bool in_gamma0(std::int64_t N) const { return det() == 1 && c % N == 0; }
  Mat2 operator-() const { return {-a, -b, -c, -d}; }
  std::string str() const;

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// (Q o g)(x, y) = Q(g.a x + g.b y, g.c x + g.d y). A right action:
/// (Q o g) o h = Q o (g h); the Heegner point moves as alpha -> g^{-1} alpha.
QuadForm transform(const QuadForm& q, const Mat2& g);

/// Root of a t^2 + b t + c in the upper half-plane: (-b + i sqrt|D|)/(2a) for
/// a > 0, the conjugate root for a < 0, so that alpha(-Q) = alpha(Q).
Complex heegner_point(const QuadForm& q, const PrecCtx& ctx);

struct Reduction {
  QuadForm reduced;
  Mat2 g;  // q o g == reduced
};

/// Gauss reduction of a positive definite form: |b| <= a <= c, b >= 0 when
/// |b| == a or a == c.
Reduction sl2_reduce(const QuadForm& q);

/// SL2(Z) automorphs of a positive definite form (2, 4 or 6 matrices,
/// including -I). Derived from t^2 + D u^2 = 4 on the primitive part.
std::vector<Mat2> automorphs(const QuadForm& q);
int automorph_order(const QuadForm& q);

/// Some gamma in Gamma0(N) with q1 o gamma == q2, if one exists. Both forms
/// must share discriminant and definiteness (DiscMismatch otherwise).
std::optional<Mat2> gamma0_equivalent(const QuadForm& q1, const QuadForm& q2, std::int64_t N);

/// Order of the stabilizer of q in the image of Gamma0(N) in PSL2(Z): 1, 2 or 3.
int gamma0_stabilizer_order(const QuadForm& q, std::int64_t N);

enum class SignMode { Both, PositiveOnly };
std::string to_string(SignMode m);
SignMode sign_mode_from_string(const std::string& s);

struct ClassRep {
  QuadForm form;
  int stabilizer = 1;
  friend bool operator==(const ClassRep&, const ClassRep&) = default;
};

/// Gamma0(N)-classes of forms of discriminant -D with N | a, b = rho (mod 2N).
struct ClassSet {
  std::int64_t D = 0;
  std::int64_t rho = 0;
  std::int64_t N = 1;
  SignMode sign_mode = SignMode::Both;
  std::int64_t a_max = 0;
  std::vector<ClassRep> reps;

  friend bool operator==(const ClassSet&, const ClassSet&) = default;
};

void to_json(nlohmann::json& j, const ClassSet& cs);
void from_json(const nlohmann::json& j, ClassSet& cs);

/// Exhaustive search over 0 < |a| <= a_max (default N*(D+4)), deduplicated
/// by gamma0_equivalent and re-run at 2*a_max; throws BoundUnstable when the
/// two runs disagree. Requires D > 0 and rho^2 = -D (mod 4N).
ClassSet enumerate_classes(std::int64_t D, std::int64_t rho, std::int64_t N, SignMode mode,
                           std::int64_t a_max = 0);

/// Twist data: fundamental discriminant delta (or 1) and r with r^2 = delta (mod 4N).
struct TwistParams {
  std::int64_t delta = 1;
  std::int64_t r = 1;

  /// epsilon = 1 for delta > 0, i for delta < 0.
  bool epsilon_is_i() const { return delta < 0; }
  /// Throws ConfigError unless delta is 1 or fundamental and r^2 = delta (mod 4N).
  void validate(std::int64_t N) const;
};

/// Generalized genus character by the defining recipe: 0 unless delta | disc,
/// disc/delta is a square mod 4N and gcd(a, b, c, delta) = 1; otherwise
/// (delta/n) for the smallest |n| coprime to delta represented by q on the
/// grid |x|, |y| <= search_bound (escalating x4 up to three times before
/// throwing NoRepresentativeFound). Always 1 for delta = 1.
int genus_char(const QuadForm& q, const TwistParams& tw, std::int64_t N, std::int64_t search_bound = 50);

/// Same character via a factorization delta = d1*d2 into discriminants and
/// N = N1*N2 with (d1, N1 a') = (d2, N2 c') = 1, where [a', b', N c'] is
/// the N|c form attached to q; 0 if no such factorization exists.
int genus_char_gkz(const QuadForm& q, const TwistParams& tw, std::int64_t N);

/// True when n is a square modulo m.
bool is_square_mod(std::int64_t n, std::int64_t m);

}  // namespace cmtrace

#endif  // CMTRACE_QUADFORMS_HPP
