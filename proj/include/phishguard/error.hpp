#pragma once

#include <stdexcept>
#include <string>

namespace phishguard {

/// Failure category. Maps one-to-one onto the C API status codes and the CLI
/// exit codes.
enum class ErrorKind {
  config = 1,
  runtime = 2,
  io = 3,
  invalid_argument = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed configuration, schema or dataset content.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorKind::config, message) {}
};

/// Precondition violated by a caller (bad dimensions, out-of-range values).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message) : Error(ErrorKind::invalid_argument, message) {}
};

/// Training or pipeline failure during a run.
class RuntimeFailure : public Error {
 public:
  explicit RuntimeFailure(const std::string& message) : Error(ErrorKind::runtime, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

/// Throws the Error subclass matching kind.
[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
  switch (kind) {
    case ErrorKind::config: throw ConfigError(message);
    case ErrorKind::runtime: throw RuntimeFailure(message);
    case ErrorKind::io: throw IoError(message);
    case ErrorKind::invalid_argument: throw InvalidArgument(message);
  }
  throw Error(kind, message);
}

}  // namespace phishguard
