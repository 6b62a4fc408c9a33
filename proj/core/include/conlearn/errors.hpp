#pragma once

#include <stdexcept>
#include <string>

namespace conlearn {

// Parameter outside the documented domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Parameters are well-formed but fall in a regime the model does not cover,
// e.g. f >= alpha malicious nodes, where the all-blue state stops being
// absorbing.
class UnsupportedRegime : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A computation that must succeed for valid input did not (singular solve,
// non-finite intermediate).
class NumericFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Simulator set-up that cannot be executed as requested.
class ConfigurationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace conlearn
