#pragma once

#include <stdexcept>

namespace strata_bounds {

// Input violates the data contract: unreadable file, negative counts,
// missing arms, a prior/arm mismatch, or anything else the caller could
// fix by supplying different data. Mapped to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empirical survival decreases in the treatment level, so the stratum
// proportions are not identified on the point-estimate path.
class MonotonicityError : public InputError {
 public:
  using InputError::InputError;
};

// A condition that indicates a bug rather than bad input, e.g. solver
// cycling or an infeasible polytope built from a valid distribution.
// Mapped to CLI exit code 1.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace strata_bounds
