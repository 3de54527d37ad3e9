#pragma once

#include <stdexcept>
#include <string>

namespace iacr {

/// Malformed or out-of-range caller input (bad sizes, empty sample sets, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition on a matrix argument does not hold.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A matrix that must be invertible (or of full column rank) is not.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The zero-forcing precoder does not exist for the requested stream count.
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The desired direction lies inside the span it must be orthogonal to.
class DegenerateDirectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a special function or test statistic.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace iacr
