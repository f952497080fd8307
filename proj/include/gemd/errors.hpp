#ifndef GEMD_ERRORS_HPP
#define GEMD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gemd {

// Error taxonomy shared by all modules. Each condition gets its own type so
// callers can catch precisely; all derive from Error for blanket handling.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation outside a function's real domain (w <= 0 where the log diverges,
// Lambert branch violations, grid points past a singularity).
struct DomainError : Error {
  using Error::Error;
};

// Hyperparameters violating a family invariant (q = 1, kappa = 0, ...).
struct ParamError : Error {
  using Error::Error;
};

// Numeric inversion or a fixed-point iteration failed to reach tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

// Vector arguments of incompatible length.
struct LengthMismatch : Error {
  using Error::Error;
};

struct NonFiniteGradient : Error {
  using Error::Error;
};

// A stepper produced the all-zero vector before normalization (step size too
// large for the link geometry).
struct DegenerateState : Error {
  using Error::Error;
};

// Stopping rule asked to normalize by a nonpositive initial FW gap.
struct DegenerateStart : Error {
  using Error::Error;
};

struct ArgumentError : Error {
  using Error::Error;
};

// Requested closed-form data (e.g. a group law) not registered for a family.
struct UnsupportedFamily : Error {
  using Error::Error;
};

// Malformed descriptor, config, or trace file.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace gemd

#endif  // GEMD_ERRORS_HPP
