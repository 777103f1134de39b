#pragma once

#include <stdexcept>
#include <string>

namespace vmfb {

/// Operand dimensions disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A (proximable, metric) pair or other combination has no exact evaluation.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative inner routine (bisection, power iteration, factorization)
/// failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step size or relaxation parameter lies outside its admissible range.
class ParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace vmfb
