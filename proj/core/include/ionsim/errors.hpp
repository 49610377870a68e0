#pragma once

#include <stdexcept>

namespace ionsim {

// A state or operator failed one of its numerical invariants
// (Hermiticity, unit trace, positivity, normalization).
class InvariantError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested Fock content or block index exceeds the truncation N_max.
class CutoffError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// The request is well-formed but outside the regime the method supports,
// e.g. intrinsic decoherence with a time-dependent coupling.
class UnsupportedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ionsim
