#pragma once

#include <stdexcept>
#include <string>

namespace irtid {

/// Argument outside the mathematical domain of an operation (θ ∉ (0,1),
/// probability outside [0,1], non-finite input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Model or configuration failed validation. `index()` is the 0-based item
/// index when the failure is attributable to a single item, otherwise -1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what, long index = -1)
      : std::invalid_argument(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Root finding found no solution inside the attainable range.
class NoSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A recovery produced no admissible knots.
class EmptyGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data that cannot support the requested computation (constant response
/// columns, zero variance, ...).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irtid
