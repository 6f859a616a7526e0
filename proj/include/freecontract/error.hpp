#pragma once

#include <stdexcept>
#include <string>

namespace fc {

// Input outside an operation's mathematical domain (maps to CLI exit code 2).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// An iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fc
