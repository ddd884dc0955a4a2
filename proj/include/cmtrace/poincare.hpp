#ifndef CMTRACE_POINCARE_HPP
#define CMTRACE_POINCARE_HPP

// Scalar Maass-Poincare series on Gamma0(N) by direct summation over cosets
// Gamma_inf \ Gamma0(N), their Atkin-Lehner translates, iterated raising,
// and the principal parts of their twisted lifts.
//
//   F_m(z, s, k) = 1/(2 Gamma(2s)) sum_{gamma} [M_{s,k}(4 pi m y) e(-m x)] |_k gamma
//
// For even k the cosets gamma and -gamma contribute equally, so only the
// half-set {identity} u {(c, d) : c > 0, N | c, gcd(c, d) = 1} is summed and
// the factor 1/2 is dropped.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmtrace/numkernel.hpp"
#include "cmtrace/qseries.hpp"
#include "cmtrace/quadforms.hpp"

namespace cmtrace {

struct PoincareSpec {
  std::int64_t m = 1;
  double s = 2.0;  // Re(s) > 1
  int k = 0;       // even weight
  std::int64_t N = 1;
  /// Exact divisor Q of N; 1 means no Atkin-Lehner translate.
  std::int64_t al_word = 1;
  /// Largest bottom-left entry summed; 0 keeps only the identity coset.
  std::optional<std::int64_t> c_max;
  /// Relative cutoff: rows are added until the estimated tail falls below
  /// term_floor times the largest term. 0 selects 2^-(prec_bits + 8).
  double term_floor = 0.0;
};

struct PoincareTerm {
  Complex coeff;
  PoincareSpec spec;
};

/// Linear combination of Poincare series sharing (s, k, N).
struct PoincareCombo {
  std::vector<PoincareTerm> terms;

  /// Weight -2k forms only: returns k.
  int raise_count() const;
};

/// y^{-k/2} M_{-k/2, s-1/2}(y) = y^{s-k/2} e^{-y/2} M(s + k/2, 2s, y).
Real whittaker_M_cal(const Real& s, int k, const Real& y, const PrecCtx& ctx);

/// (a b; c d) in SL2(Z) with the given bottom row (extended gcd completion).
Mat2 complete_row(std::int64_t c, std::int64_t d);

/// Identity plus all rows c > 0, N | c, gcd(c, d) = 1 with |c z + d| <= radius
/// (and c <= c_max when given), ordered by (c, d).
std::vector<Mat2> coset_rows(std::int64_t N, const Complex& z, double radius,
                             std::optional<std::int64_t> c_max = std::nullopt);

struct PoincareValue {
  Complex value;
  /// Estimated size of the omitted tail (absolute).
  Real truncation;
  /// Radius |cz+d| up to which rows were summed, and their number.
  double radius = 0.0;
  std::size_t rows = 0;
};

/// Tail estimate for rows with |cz + d| > R at a point of height y.
Real poincare_tail(const PoincareSpec& spec, double y, double R, const PrecCtx& ctx);

/// Rows the adaptive truncation would use at z (the Atkin-Lehner image of z
/// when al_word != 1).
std::vector<Mat2> plan_rows(const PoincareSpec& spec, const Complex& z, const PrecCtx& ctx);

/// Sum over a caller-supplied row set (no truncation estimate). The same set
/// can be reused at nearby points, which finite-difference checks rely on.
Complex eval_poincare_rows(const PoincareSpec& spec, const Complex& z, const std::vector<Mat2>& rows,
                           const PrecCtx& ctx, int jobs = 1);

/// F_m(z, s, k) (or its translate (F |_k W_Q)(z)) with adaptive truncation.
/// Throws NonConvergent unless s > 1, ConfigError for odd k.
PoincareValue eval_poincare(const PoincareSpec& spec, const Complex& z, const PrecCtx& ctx, int jobs = 1);

/// (4 pi m)^k prod_{j<k} (s + j - k), the factor relating R^k F_m(., s, -2k)
/// to F_m(., s, 0).
Real raising_prefactor(std::int64_t m, double s, int k, const PrecCtx& ctx);

/// Iterated raising of a weight -2k combination, evaluated through
/// F_m(., s, 0) at the translated point.
PoincareValue eval_dF(const PoincareCombo& combo, const Complex& z, const PrecCtx& ctx, int jobs = 1);

/// Constant of the twisted lift of F_m(., s, -2k): the even-k display when k
/// is even, the odd-k display otherwise. The odd constant does not depend on m.
Complex lift_constants(int k, double s, std::int64_t N, std::int64_t m, const TwistParams& tw, const PrecCtx& ctx);
/// Same constant assembled from logarithms; used as a cross-check.
Complex lift_constants_logspace(int k, double s, std::int64_t N, std::int64_t m, const TwistParams& tw,
                                const PrecCtx& ctx);

/// Component h' of the vector index that W_Q sends h to: h' = -h modulo the
/// part of 2N belonging to Q, h' = h modulo the rest.
std::int64_t al_component(std::int64_t h, std::int64_t N, std::int64_t Q);

struct PrincipalTerm {
  BigRational exponent;  // q-power
  std::int64_t h = 0;    // component mod 2N
  Complex coeff;
};

/// Principal part of the lift of a weight -2k combination. Each term F_m|W_Q
/// contributes, for n | m,
///   C (delta/n) n^{-(k+1)} (k even) or C (delta/n) n^k (k odd)
/// times q^{-m^2 |delta| / (4 N n^2)} (e_{h'} + sgn(delta) e_{-h'}),
/// with h = r m / n moved by W_Q. Terms are merged and sorted by (exponent, h);
/// exact zeros are dropped.
std::vector<PrincipalTerm> lift_principal_part(const PoincareCombo& combo, const TwistParams& tw, int k,
                                               const PrecCtx& ctx);

}  // namespace cmtrace

#endif  // CMTRACE_POINCARE_HPP
