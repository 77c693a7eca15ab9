#pragma once

#include <stdexcept>
#include <string>

namespace mdlab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, out-of-range parameters, mixed realizations.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Exact integer arithmetic left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// A configured size cap was hit (ball size, BFS horizon, sample budget).
class ResourceError : public Error {
 public:
  using Error::Error;
};

// An element lies beyond the BFS horizon: the caller has to enlarge R.
class HorizonError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

// A multiplier was asked for a value it cannot produce.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A construction failed its own contract checks (a bug, not an input error).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdlab
