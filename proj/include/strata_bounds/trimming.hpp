#pragma once

#include <vector>

#include "strata_bounds/strata.hpp"

namespace strata_bounds {

// Closed interval, possibly empty or a single point. Stratum-mean regions
// live in [0,1]; contrast regions live in [-1,1].
struct FeasibleInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool is_empty = false;

  static FeasibleInterval closed(double lo, double hi);
  static FeasibleInterval point(double v) { return closed(v, v); }
  static FeasibleInterval empty();

  bool contains(double v, double tol = kOptTol) const;
  FeasibleInterval intersect(const FeasibleInterval& other) const;
  bool operator==(const FeasibleInterval&) const = default;
};

// Sharp bounds on the mean of a fraction-omega subgroup of a Bernoulli(p)
// population: the subgroup mean is lowest when the subgroup absorbs all the
// zeros first and highest when it absorbs all the ones first.
// Requires p in [0,1] (within kOptTol) and omega in (0,1] (within kOptTol
// above 1); throws InputError otherwise. omega == 1 collapses to {p}.
FeasibleInterval trim_bounds(double p, double omega);

// Mean of the group pooling strata l..z at arm z once the identified strata
// below l are subtracted, together with the target stratum's share of that
// group.
struct CoarsenedMean {
  enum class Status { kOk, kEmptyGroup, kIncompatible };
  Status status = Status::kOk;
  double value = 0.0;      // clamped into [0,1] when within tol of it
  double raw_value = 0.0;  // as computed, possibly outside [0,1]
  double weight = 0.0;     // p_cond(l, z) / group mass share
};

// mu_lower[k] is the identified mean of stratum k for k < l; entries for
// empty strata are ignored (their conditional mass is zero). Requires
// l <= z and surv[z] > 0.
CoarsenedMean coarsened_mean(const ObservedDistribution& obs,
                             const StrataProfile& profile, int z, int l,
                             const std::vector<double>& mu_lower,
                             double tol = kOptTol);

// Bounds on the stratum mean at one arm using that arm's data alone:
// trim_bounds of the survivor outcome mean at the stratum's conditional
// share. Requires a nonempty stratum with stratum <= z.
FeasibleInterval marginal_mu_interval(const ObservedDistribution& obs,
                                      const StrataProfile& profile,
                                      int stratum, int z);

// Interval difference of the two marginal intervals, clipped to [-1,1].
FeasibleInterval marginal_contrast_interval(const ObservedDistribution& obs,
                                            const StrataProfile& profile,
                                            const Contrast& contrast);

}  // namespace strata_bounds
