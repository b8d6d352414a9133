#pragma once

#include <stdexcept>
#include <string>

namespace gravipose {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact polynomial division left a remainder above tolerance.
class NotDivisible : public Error {
 public:
  NotDivisible(const std::string& what, double remainder_ratio)
      : Error(what), remainder_ratio_(remainder_ratio) {}
  double remainder_ratio() const noexcept { return remainder_ratio_; }

 private:
  double remainder_ratio_;
};

/// Input geometry does not determine a pose (pure rotation, collinear points,
/// rank-deficient design matrix, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Robust estimation found no hypothesis with enough support.
class NoModel : public Error {
 public:
  using Error::Error;
};

/// The synthetic scene generator could not satisfy its visibility constraints.
class GenerationFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or argument. `line()` is 0 when not tied to a line.
class InputError : public Error {
 public:
  InputError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace gravipose
