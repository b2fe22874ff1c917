#pragma once

#include <stdexcept>
#include <string>

namespace revshell {

// Input that violates a documented precondition or range.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular systems, failed eigen-solves, unstable time steps.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A kernel or density evaluation requested where it is not defined
// (e.g. a junction node, the internal-edge case).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Files that cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace revshell
