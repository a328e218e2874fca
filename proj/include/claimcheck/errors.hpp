#pragma once

#include <stdexcept>

namespace claimcheck {

// File could not be opened or read.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (bad JSON, bad label string, wrong arity).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a data invariant (duplicate ids, etc).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace claimcheck
