#pragma once

#include <stdexcept>

namespace ionsim {

/// Shape or size mismatch, or a dimension beyond the memory guards.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite input to a numeric kernel.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation requested on a spin register whose representation cannot express it.
class RepresentationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Displacement amplitude too large for the Fock cutoff.
class TruncationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// State is not normalized or otherwise unusable.
class StateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace ionsim
