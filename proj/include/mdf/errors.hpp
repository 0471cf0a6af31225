#pragma once

#include <stdexcept>
#include <string>

namespace mdf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed case document: bad JSON, missing keys, wrong types.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input that breaks a model invariant
// (dangling bus reference, reversed service window, non-PSD covariance).
struct ValidationError : Error {
  using Error::Error;
};

// Bad argument to an operation (probability outside (0,1), unknown
// constraint handle, zero sample count).
struct ArgumentError : Error {
  using Error::Error;
};

// Numerical breakdown: singular matrix, factorization failure.
struct NumericsError : Error {
  using Error::Error;
};

// A solved program violated a post-condition that must hold by
// construction; carries the offending constraint handle in the message.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace mdf
