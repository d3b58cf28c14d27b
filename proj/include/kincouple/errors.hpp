#pragma once

#include <stdexcept>
#include <string>

namespace kincouple {

/// Base of every error the library throws. Callers that only care about
/// "numerical failure vs. bad input" can catch this and `InvalidParameters`.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical or structural precondition was violated. The message names the
/// failing invariant.
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class CausticError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class MemoryGuard : public Error {
 public:
  using Error::Error;
};

}  // namespace kincouple
