#pragma once

#include <stdexcept>
#include <string>

namespace ftl {

/// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Configuration outside the forward model's domain.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Shapes or point sets with incompatible discretizations.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Projection onto the plane orthogonal to a rotation axis vanished.
class DegenerateProjection : public Error {
 public:
  using Error::Error;
};

class EmptyLibrary : public Error {
 public:
  using Error::Error;
};

/// Plan and path disagree (step count, interval indices, ...).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input: short paths, unreadable files, bad JSON.
class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ftl
