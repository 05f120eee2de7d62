#pragma once

#include <stdexcept>
#include <string>

namespace rlcycle {

// Argument dimensions do not chain or do not match a declared size.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scalar argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed weight manifest, config file, or wire payload.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an interface contract (missing batch column, short buffer).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN or Inf where only finite values are allowed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rlcycle
