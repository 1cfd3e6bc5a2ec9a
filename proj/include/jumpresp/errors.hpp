#pragma once

#include <stdexcept>
#include <string>

namespace jumpresp {

// Invalid input: bad dimensions, schema violations, violated preconditions.
// The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Covariance (or other matrix) failed its positive-definite factorization.
class NotPositiveDefinite : public ValidationError {
 public:
  explicit NotPositiveDefinite(const std::string& what) : ValidationError(what) {}
};

// Singular I + H in an affine jump map.
class NonInvertibleJump : public ValidationError {
 public:
  explicit NonInvertibleJump(const std::string& what) : ValidationError(what) {}
};

// Failure during computation: blow-up, density underflow, singular systems.
// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jumpresp
