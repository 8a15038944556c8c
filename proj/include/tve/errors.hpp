#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tve {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad sizes, dt <= 0, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

class NonFiniteInput : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class BadConfig : public Error {
public:
  using Error::Error;
};

class BadData : public Error {
public:
  using Error::Error;
};

class SolverFailure : public Error {
public:
  using Error::Error;
};

class EmptyComplement : public Error {
public:
  using Error::Error;
};

class DomainExit : public Error {
public:
  using Error::Error;
};

class StateCorrupt : public Error {
public:
  using Error::Error;
};

/// Raised when the implicit step cannot reach the requested residual.
class NonlinearSolveFailure : public Error {
public:
  NonlinearSolveFailure(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

class ParseError : public Error {
public:
  using Error::Error;
};

/// Carries every violation found while validating a config, each prefixed
/// with the offending field path.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> problems);

  std::vector<std::string> violations;
};

}  // namespace tve
