#ifndef CMTRACE_TRACES_HPP
#define CMTRACE_TRACES_HPP

// Twisted modular traces
//
//   Tr(f; d, h) = sum over Gamma0(N)-classes Q of discriminant -d|delta|,
//                 N | a, b = r h (mod 2N), of chi_delta(Q) / |Gamma_Q| * df(alpha_Q)
//
// where df = f for the weight 0 closed forms and the iterated raising of a
// weight -2k Poincare combination otherwise. The lattice index used by the
// principal parts is m = d / (4N).

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cmtrace/poincare.hpp"
#include "cmtrace/quadforms.hpp"

namespace cmtrace {

enum class ClosedForm { J, Gamma0_6_F };

struct FormSpec {
  std::variant<ClosedForm, PoincareCombo> f;

  /// Level the form lives on.
  std::int64_t level() const;
  /// Number of raisings applied before evaluation (0 for closed forms).
  int raise_count() const;
  nlohmann::json canonical() const;
};

struct TraceRequest {
  TwistParams tw;
  std::int64_t d = 1;
  std::int64_t h = 1;
  std::int64_t N = 1;
  FormSpec f;
  SignMode sign_mode = SignMode::Both;

  /// Discriminant magnitude d |delta| of the forms summed.
  std::int64_t disc() const;
  /// Throws ConfigError unless -sgn(delta) d is a square mod 4N, (r h)^2 = -d|delta|
  /// (mod 4N) and the form lives on level N.
  void validate() const;
  nlohmann::json canonical(const PrecCtx& ctx) const;
};

struct TraceRow {
  QuadForm form;
  int chi = 0;
  int stabilizer = 1;
  Complex value;  // df(alpha_Q); zero (unevaluated) when chi = 0
};

struct TraceReport {
  Complex value;
  std::vector<TraceRow> rows;
  /// Sum over rows of the Poincare truncation estimates (0 for closed forms).
  Real truncation;
  prec_t prec_bits = 0;
  std::string cache_key;
  bool from_cache = false;
};

nlohmann::json to_json(const TraceReport& r);
TraceReport report_from_json(const nlohmann::json& j);

/// JSON file mapping request hashes to reports. Readers see whatever the file
/// held when it was last loaded; writers reload, merge and replace the file
/// through a rename, so concurrent writers can lose entries but never corrupt it.
class TraceCache {
 public:
  explicit TraceCache(std::string path);

  std::optional<nlohmann::json> lookup(const std::string& key);
  void store(const std::string& key, const nlohmann::json& entry);
  const std::string& path() const { return path_; }

 private:
  nlohmann::json read_file() const;

  std::string path_;
  std::mutex mutex_;
  nlohmann::json entries_;
  bool loaded_ = false;
};

/// Hex SHA-256 of the canonical request serialization.
std::string cache_key(const TraceRequest& req, const PrecCtx& ctx);

struct TraceOptions {
  int jobs = 1;
  TraceCache* cache = nullptr;
};

/// Holds class sets and CM values across calls. The value memo is keyed by
/// the positive form, so h and -h share evaluations.
class TraceSession {
 public:
  explicit TraceSession(PrecCtx ctx, TraceOptions opts = {}) : ctx_(ctx), opts_(opts) {}

  TraceReport trace(const TraceRequest& req);
  Complex trace_combination(const std::vector<std::pair<Complex, TraceRequest>>& terms);

  const PrecCtx& ctx() const { return ctx_; }

 private:
  const ClassSet& classes(std::int64_t D, std::int64_t rho, std::int64_t N, SignMode mode);

  PrecCtx ctx_;
  TraceOptions opts_;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t, SignMode>, ClassSet> class_sets_;
  std::map<std::pair<std::string, std::tuple<std::int64_t, std::int64_t, std::int64_t>>, std::pair<Complex, Real>>
      values_;
};

TraceReport trace(const TraceRequest& req, const PrecCtx& ctx, TraceOptions opts = {});
Complex trace_combination(const std::vector<std::pair<Complex, TraceRequest>>& terms, const PrecCtx& ctx,
                          TraceOptions opts = {});

/// Coefficient c(index, h) of the holomorphic part of a vector-valued form.
struct HarmonicCoeff {
  BigRational index;
  std::int64_t h = 0;
  BigRational value;
};

struct DualityResult {
  Complex lhs;
  Complex rhs;
  Complex residual;  // lhs - rhs
  /// Largest single pairing term, for relative comparisons.
  Real scale;
};

/// Pairing identity between a harmonic form F (coefficients given) and the
/// lift of the Poincare combination `combo`:
///   lhs = sum_{index < 0} c(index, h) Tr(df; -4N index, h)
///   rhs = -sum over lift principal terms (e, h, a) of c(-e, h) a
/// The traces use `trace_form` when given (for combinations outside the
/// convergent range that have a closed form), otherwise the combination itself.
DualityResult duality_residual(const std::vector<HarmonicCoeff>& F_coeffs, const PoincareCombo& combo,
                               const TwistParams& tw, int k, const PrecCtx& ctx, TraceOptions opts = {},
                               const std::optional<FormSpec>& trace_form = std::nullopt);

/// Difference between two principal parts, term by term: the max over all
/// (exponent, h) of |a - b| together with the largest |a| or |b|.
std::pair<Real, Real> principal_part_residual(const std::vector<PrincipalTerm>& a,
                                              const std::vector<PrincipalTerm>& b, prec_t wp);

}  // namespace cmtrace

#endif  // CMTRACE_TRACES_HPP
