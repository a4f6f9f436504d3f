#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsmo {

/// Argument outside the mathematical domain of an operation (e.g. alpha not in (0,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation called with inputs that violate its precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Histories or vectors that should agree in shape or step size do not.
class ConsistencyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Expression evaluation produced a non-finite value.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated quantity left the overflow guard.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace fracsmo
