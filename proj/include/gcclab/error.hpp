#pragma once

#include <stdexcept>
#include <string>

namespace gcclab {

// Exit-code families used by the command-line front end.
enum class ErrorKind { check_failure = 1, usage = 2, numerical = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Violated precondition or malformed input.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

// Eigensolver or quadrature failure.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

// A mathematical property that was expected to hold did not.
class CheckFailure : public Error {
 public:
  explicit CheckFailure(const std::string& what) : Error(ErrorKind::check_failure, what) {}
};

}  // namespace gcclab
