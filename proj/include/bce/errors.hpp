#pragma once

#include <stdexcept>
#include <string>

namespace bce {

/// Malformed or out-of-range caller input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition fails (e.g. KL with missing support).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An enumeration or problem size exceeds a configured cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The LP solver did not reach an optimal, verified solution.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  const std::string& status() const noexcept { return status_; }

 private:
  std::string status_;
};

}  // namespace bce
