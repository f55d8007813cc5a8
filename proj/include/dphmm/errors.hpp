#pragma once

#include <stdexcept>

namespace dphmm {

// Belief vector fails its distribution invariants (negative mass, bad sum,
// or every entry below the zero threshold).
struct InvalidBeliefError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every state in the constraint has zero likelihood for an observed answer;
// usually a mechanism/density mismatch.
struct ImpossibleObservationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Repair was asked to protect a constraint with no candidate neighbor.
struct CannotProtectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The true state fell outside the constraint derived from the prior.
struct ModelInconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation not defined for the polytope's dimension (e.g. volume of a
// full-dimensional body with d > 2).
struct UnsupportedDimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dphmm
