#pragma once

#include <stdexcept>
#include <string>

namespace obs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate or otherwise unusable simplex input.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not available in this dimension.
class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// Mesh fails one of its structural invariants.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver or linear solver failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Bad user input: shape strings, configuration values, mode indices.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace obs
