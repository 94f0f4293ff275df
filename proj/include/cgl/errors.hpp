#pragma once

#include <stdexcept>
#include <string>

namespace cgl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or missing user input (bad config, missing domain volume, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis required by the requested construction fails.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Grids or fields that do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Requested modes cannot be represented on the grid.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// Floating-point failure, step-size/accuracy check failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not converge (Newton stagnation, no contraction).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgl
