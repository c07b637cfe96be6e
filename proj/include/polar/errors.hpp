#pragma once

#include <stdexcept>
#include <string>

namespace polar {

// Invalid arguments relative to a function's mathematical domain
// (kernel parameters, points off the set, radii out of range).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A discretization produced no usable nodes (e.g. an empty local patch).
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Payoff construction hit a coincident node pair under an unbounded kernel.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem too large for a dense method.
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

// Malformed or inadmissible run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace polar
