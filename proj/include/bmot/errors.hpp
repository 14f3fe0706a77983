#pragma once

#include <stdexcept>
#include <string>

namespace bmot {

/// Input failed a constructor invariant (non-PD covariance, bad weights, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine did not reach its contract (no convergence,
/// singular linear system, infeasible LP).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON/CSV syntax or schema).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bmot
