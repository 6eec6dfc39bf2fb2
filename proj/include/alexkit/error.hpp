#pragma once

#include <stdexcept>
#include <string>

namespace alexkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was not met; the CLI maps this to exit 2.
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No triangle with the given side lengths exists in the comparison plane.
class NonexistenceError : public DomainError {
 public:
  NonexistenceError(std::string condition)
      : DomainError("comparison triangle does not exist: " + condition),
        condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// The angle at a vertex is undefined because an adjacent side has length zero.
class UndefinedAngleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A discrete gradient curve found no point to move to.
class StalledError : public Error {
 public:
  using Error::Error;
};

}  // namespace alexkit
