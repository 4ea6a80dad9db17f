#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gspn {

// Structural problem in a net definition (builder or net file).
class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed net-definition or parameter file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when immediate transitions keep firing at a single instant.
class LivelockError : public SimulationError {
 public:
  LivelockError(std::string message, std::vector<std::string> transitions)
      : SimulationError(std::move(message)), transitions_(std::move(transitions)) {}

  const std::vector<std::string>& transitions() const noexcept { return transitions_; }

 private:
  std::vector<std::string> transitions_;
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gspn
