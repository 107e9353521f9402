#pragma once

#include <stdexcept>
#include <string>

namespace sccl {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents are inconsistent with what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An index (channel, element, ...) is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A layer configuration violates its own constraints (divisibility,
/// overlap bounds, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A plain argument is unusable (empty list, non-positive count, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A fixture file is malformed: bad magic, bad extents, truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value where finiteness is guaranteed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A model-spec document does not describe a buildable network.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace sccl
