#pragma once

#include <stdexcept>
#include <string>

namespace cournot {

/// Base of every error raised by the solver.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (wrong types, missing or unknown keys).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a cross-field invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A real coordinate lies more than half a step outside its axis.
class OutOfBounds : public Error {
 public:
  using Error::Error;
};

/// A lattice index exceeds its axis count.
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// The requested (T, aperture, x) cell is not in the Cournot graph.
class NotInGraph : public Error {
 public:
  using Error::Error;
};

/// The queried cell is not a non-terminal cell of the bridge.
class NotInBridge : public Error {
 public:
  using Error::Error;
};

/// Two trajectories do not meet at their junction.
class MismatchedJunction : public Error {
 public:
  using Error::Error;
};

}  // namespace cournot
