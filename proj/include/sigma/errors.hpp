#pragma once

#include <stdexcept>
#include <string>

namespace sigma {

/// Caller misuse: an element outside the carrier, a malformed literal, a bad
/// tolerance. Never used to signal that a sum is undefined.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A literal or generator description that does not parse.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// A construction whose preconditions fail (non-injective restriction,
/// non-composable chain, unverified homomorphism, ...).
class ConstructionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The request cannot be answered by enumeration, e.g. a symbolic carrier
/// that provides no sample generator.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sigma
