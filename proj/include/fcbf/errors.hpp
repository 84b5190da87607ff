#pragma once

#include <stdexcept>
#include <string>

namespace fcbf {

/// Raised when a configuration value violates a documented invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for filter orders other than the first-order low-pass path.
class UnsupportedConfiguration : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Heading to the goal is undefined when the vehicle sits on the goal point.
class GoalSingularity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class BadProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingPrevInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StepSizeUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fcbf
