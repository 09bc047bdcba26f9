#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qtunnel {

/// Input outside the domain of a function (off-annulus point, t outside [t1, t4], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mapping evaluated at a pole (z = ia, zeta = 1).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Linear-system or iteration failure. Carries the residual history when one exists.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

/// Invalid configuration. `failures` lists every problem found, not just the first.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> failures)
      : std::invalid_argument(join(failures)), failures(std::move(failures)) {}

  std::vector<std::string> failures;

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) out += "\n  - " + item;
    return out;
  }
};

}  // namespace qtunnel
