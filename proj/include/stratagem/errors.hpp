#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stratagem {

/// Base of every exception thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed query against a state, e.g. an out-of-bounds coordinate.
class QueryError : public Error {
 public:
  using Error::Error;
};

/// A configuration could not be parsed, validated or instantiated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A checked advance received an action that is not applicable.
class RuleError : public Error {
 public:
  using Error::Error;
};

/// Bad agent spec or command-line usage.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A replay log does not reproduce the logged game.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t step, const std::string& what)
      : Error("replay diverges at step " + std::to_string(step) + ": " + what), step_(step) {}

  /// Zero-based index of the first action line that fails to reproduce.
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace stratagem
