#pragma once

#include <stdexcept>
#include <string>

namespace approxmul {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand or width outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file, unreadable path, or failed write.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A computed artifact failed one of its own cross-checks.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace approxmul
