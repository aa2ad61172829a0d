#pragma once

#include <stdexcept>
#include <string>

namespace nlskt {

// Invalid-configuration: bad sizes, negative coefficients, unknown names.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a functional (e.g. a negative density for the entropy).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input data violating an operation's precondition (e.g. unequal masses).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A discrete object that violates a structural precondition (non-M-matrix, zero total weight).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Nonlinear or linear solve that could not be completed.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlskt
