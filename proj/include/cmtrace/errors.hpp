#ifndef CMTRACE_ERRORS_HPP
#define CMTRACE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cmtrace {

/// Base for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A series or coset sum failed to reach its target within the configured limits.
struct NonConvergent : Error {
  using Error::Error;
};

/// An exact division in integer series arithmetic left a remainder (a bug, not bad input).
struct InexactDivision : Error {
  using Error::Error;
};

/// An eta quotient expansion produced a non-integral coefficient.
struct NonIntegralCoefficient : Error {
  using Error::Error;
};

/// Two quadratic forms handed to an equivalence test have different discriminants.
struct DiscMismatch : Error {
  using Error::Error;
};

/// Doubling the class-enumeration bound changed the class set.
struct BoundUnstable : Error {
  using Error::Error;
};

/// The genus-character grid search found no represented value coprime to the twist.
struct NoRepresentativeFound : Error {
  using Error::Error;
};

/// Atkin-Lehner matrix search failed; unreachable when Q || N.
struct NoSolution : Error {
  using Error::Error;
};

/// Discriminant does not satisfy the requirements of a check.
struct InvalidDiscriminant : Error {
  using Error::Error;
};

/// Invalid user-facing configuration (bad precision, tolerance, instance name).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace cmtrace

#endif  // CMTRACE_ERRORS_HPP
