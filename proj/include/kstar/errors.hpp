#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kstar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based byte offset into the source.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Invalid arguments or configuration (bad index, arity mismatch, unknown preset).
class UsageError : public Error {
public:
  using Error::Error;
};

/// Numerical precondition failures: poles, branch cuts, singular metrics.
class NumericalError : public Error {
public:
  using Error::Error;
};

class PoleError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BranchError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularMetricError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularMapError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Two jets of different chart dimension were combined.
class JetMismatchError : public Error {
public:
  using Error::Error;
};

/// A computation needs more Taylor degrees than the jet carries.
class InsufficientOrderError : public Error {
public:
  using Error::Error;
};

/// The left-multiplication recursion produced disagreeing coefficients.
class OracleInconsistencyError : public Error {
public:
  using Error::Error;
};

}  // namespace kstar
