#ifndef CMTRACE_MODEVAL_HPP
#define CMTRACE_MODEVAL_HPP

// Closed-form evaluation of eta, E4, j and the level-6 function F at points
// of the upper half-plane. Every evaluator first moves its argument into the
// standard fundamental domain, so the q-series involved have |q| <= e^{-pi sqrt 3}.

#include <cstdint>
#include <utility>

#include "cmtrace/numkernel.hpp"
#include "cmtrace/quadforms.hpp"

namespace cmtrace {

/// Moebius action of an integer matrix.
Complex apply(const Mat2& g, const Complex& z);

/// z' = gamma z with |Re z'| <= 1/2 and |z'| >= 1 (up to 2^-prec at the boundary).
std::pair<Complex, Mat2> reduce_fundamental(const Complex& z, const PrecCtx& ctx);

/// Dedekind eta. The multiplier is accumulated one T or S move at a time.
Complex eta(const Complex& z, const PrecCtx& ctx);
/// eta by direct summation of the pentagonal series at z itself (no reduction).
Complex eta_direct(const Complex& z, const PrecCtx& ctx);

Complex eisenstein_e4(const Complex& z, const PrecCtx& ctx);
/// 1 + 240 sum sigma_3(n) q^n summed at z itself (no reduction).
Complex eisenstein_e4_direct(const Complex& z, const PrecCtx& ctx);

/// j = E4^3 / eta^24.
Complex j_invariant(const Complex& z, const PrecCtx& ctx);
/// J = j - 744.
Complex J(const Complex& z, const PrecCtx& ctx);

/// -(1/40)(E4(z) + 4E4(2z) - 9E4(3z) - 36E4(6z)) / (eta(z)eta(2z)eta(3z)eta(6z))^2.
Complex gamma0_6_F(const Complex& z, const PrecCtx& ctx);

/// W = (Q a, b; N c, Q d) / sqrt(Q) with Q a d - (N/Q) b c = 1.
struct ALMatrix {
  std::int64_t a = 1, b = 0, c = 0, d = 1;
  std::int64_t N = 1;
  std::int64_t Q = 1;

  /// Integer matrix (Q a, b; N c, Q d), determinant Q.
  Mat2 scaled() const { return {Q * a, b, N * c, Q * d}; }
  Complex apply(const Complex& z) const { return cmtrace::apply(scaled(), z); }
  /// (N c z + Q d) / sqrt(Q), the automorphy factor of the normalized matrix.
  Complex j_factor(const Complex& z) const;
};

/// Solution with |b| minimal, then |c|, then |a| (positives first at each
/// tie, d = 0 when a = 0). Throws ConfigError unless Q || N.
ALMatrix atkin_lehner_matrix(std::int64_t N, std::int64_t Q);

}  // namespace cmtrace

#endif  // CMTRACE_MODEVAL_HPP
