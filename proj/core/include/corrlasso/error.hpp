#pragma once

#include <stdexcept>
#include <string>

namespace corrlasso {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative routine ran out of iterations before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Two independent evaluation routes of the same quantity disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined at the given inputs (for example a zero estimate).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

/// A configuration file or flag set failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& what) { throw InvalidArgument(what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) invalid(what);
}

}  // namespace detail
}  // namespace corrlasso
