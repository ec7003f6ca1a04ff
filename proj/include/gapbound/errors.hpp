#pragma once

#include <stdexcept>
#include <string>

namespace gapbound {

/// Base of everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad indices, malformed files, out-of-range parameters.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A model file line could not be parsed.
class ParseError : public ValidationError {
 public:
  ParseError(int line, const std::string& reason)
      : ValidationError("line " + std::to_string(line) + ": " + reason),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Hopping beyond nearest neighbours where only nearest-neighbour hopping is
/// admissible.
class LongRangeHopping : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A hopping block exceeds the declared exponential envelope.
class EnvelopeViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonHermitian : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The two lowest eigenvalues coincide within the degeneracy tolerance.
class DegenerateGroundState : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class NonDecaying : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant that must hold did not. The CLI maps these to exit
/// code 2.
class InvariantFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace gapbound
