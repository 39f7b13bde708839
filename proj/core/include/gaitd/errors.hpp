#pragma once

#include <stdexcept>
#include <string>

namespace gaitd {

/// Parameter outside the family's domain (e.g. a negative Poisson rate).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The model cannot be normalized, e.g. truncation and alteration remove
/// every unit of parent mass.
class DegenerateModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observation incompatible with the model (truncated response, bad row).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expected information is singular in some direction of coefficient space.
class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inference requested from a fit that did not converge.
class NotConvergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration. `line()` is 0 when no line applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace gaitd
