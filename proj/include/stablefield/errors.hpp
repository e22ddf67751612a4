#ifndef STABLEFIELD_ERRORS_HPP
#define STABLEFIELD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stablefield {

// Plain argument validation (alpha out of range, size mismatches, ...) uses
// std::invalid_argument. The types below carry model-level meaning and map
// onto distinct CLI exit codes.

/// A modeling precondition failed: transient class, full-support violation,
/// non-commuting generators, undecomposable family.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the recorded domain of its family (e.g. a Markov
/// path segment that no longer covers coordinate 0 after shifting).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by ledger quantifiers when some component could not be typed.
class IndeterminateLedger : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Characteristic-function scale fit had no usable theta points.
class FitUnstable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagnostic requested on an identically-zero field.
class DegenerateField : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal consistency assertion failed (two independent routes
/// disagreed). Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace stablefield

#endif  // STABLEFIELD_ERRORS_HPP
