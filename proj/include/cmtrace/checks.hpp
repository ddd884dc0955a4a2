#ifndef CMTRACE_CHECKS_HPP
#define CMTRACE_CHECKS_HPP

// Identity checks run by the verify tool: each compares an exact integer
// from a q-series oracle (or a pairing of principal parts) with a trace
// computation and reports the residual.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmtrace/traces.hpp"

namespace cmtrace {

enum class Format { Json, Csv, Text };

Format format_from_string(const std::string& s);

struct RunConfig {
  /// Unset: 256 bits for eta25 checks, 128 otherwise.
  std::optional<prec_t> prec_bits;
  /// Unset: 1e-6 for eta25 checks, 1e-10 otherwise.
  std::optional<double> tolerance;
  /// Fixed coset cutoff for every Poincare series; unset uses the tail bound.
  std::optional<std::int64_t> c_max;
  std::string cache_path;
  Format format = Format::Json;
  int jobs = 1;
  bool timing = true;

  /// Throws ConfigError unless tolerance > 0, prec_bits >= 64 and jobs >= 1.
  void validate() const;
};

struct CheckReport {
  std::string check;
  nlohmann::json inputs;
  std::string lhs;
  std::string rhs;
  std::string abs_residual;
  std::string rel_residual;
  bool pass = false;
  prec_t prec_bits = 0;
  std::optional<std::int64_t> c_max;
  double wall_ms = 0.0;
  double tolerance = 0.0;
  /// Check-specific extras (eta25 ratio, truncation, class counts).
  nlohmann::json diagnostics = nlohmann::json::object();
};

nlohmann::json to_json(const CheckReport& r, bool timing = true);

/// a_f((|delta|+1)/24) against i (T1 - T5 + T7 - T11) / (8 sqrt|delta|) with the
/// level-6 closed form. Throws InvalidDiscriminant unless delta < 0 is
/// fundamental and delta = 1 (mod 24).
CheckReport cmd_mock_theta(std::int64_t delta, const RunConfig& cfg);

/// Coefficient of eta^-25 at q^{(24n-1)/24} against the printed constant
/// times the trace of the raised lift input at d = 24n - 1, h = 1.
CheckReport cmd_eta25(std::int64_t n, const RunConfig& cfg);

/// lhs ratio(n1), rhs ratio(n2), where ratio(n) = coefficient (24n-1)^7 / trace.
CheckReport cmd_eta25_ratio(std::int64_t n1, std::int64_t n2, const RunConfig& cfg);

/// Trace of J over positive forms of discriminant -d on SL2(Z), compared with
/// the nearest integer. Throws InvalidDiscriminant unless d = 0, 3 (mod 4).
CheckReport cmd_zagier(std::int64_t d, const RunConfig& cfg);

/// Instances: "mock_theta" (delta = -23 pairing), "eta25" (lift principal part
/// against twice the lift constant times (q^{-25/24} + 25 q^{-1/24})), "empty".
CheckReport cmd_duality(const std::string& instance, const RunConfig& cfg);

/// The standard battery, in a fixed order.
std::vector<CheckReport> run_all(const RunConfig& cfg);

std::string render(const std::vector<CheckReport>& reports, Format format, bool timing = true);

}  // namespace cmtrace

#endif  // CMTRACE_CHECKS_HPP
