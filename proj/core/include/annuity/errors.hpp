#pragma once

#include <stdexcept>
#include <string>

namespace annuity {

// Parameter set violates a model invariant. Message names the constraint.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function (c <= 0, x <= 0, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Operation needs a stopping boundary but the parameters are in the ruined regime,
// or the other way round.
struct RegimeError : std::logic_error {
  using std::logic_error::logic_error;
};

struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

// Wealth or shadow price outside the range the solver maps.
struct OutOfRangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace annuity
