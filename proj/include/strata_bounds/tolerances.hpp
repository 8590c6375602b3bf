#pragma once

namespace strata_bounds {

// Slack for identities that hold in exact arithmetic (probability sums,
// mixture reconstructions).
inline constexpr double kIdentityTol = 1e-12;

// Slack for quantities produced by optimization or comparison of derived
// floats: interval membership, [0,1] clamping, simplex pivots.
inline constexpr double kOptTol = 1e-9;

}  // namespace strata_bounds
