#pragma once

#include "strata_bounds/trimming.hpp"

namespace strata_bounds::oracle {

// Exhaustive-search settings. The solvers discretize stratum means to
// points_per_axis equispaced values in [0,1]; `tolerance` is the row slack
// used by the arm-constant compatibility scan.
struct GridSpec {
  int points_per_axis = 51;
  double tolerance = 0.02;
};

// Smallest achievable max ordered within-stratum gap. All but one stratum
// per arm run over the grid; the remaining one is solved from the arm's
// mixture row, so every visited point is exactly feasible and the result
// sits within one grid step above the true minimum. Throws InputError when
// no assignment closes the rows inside [0,1].
double grid_delta_max_slb(const ObservedDistribution& obs,
                          const StrataProfile& profile,
                          const GridSpec& grid = {});

// Whether some grid point with arm-constant stratum means passes the rows.
bool grid_h0_compatible(const ObservedDistribution& obs,
                        const StrataProfile& profile, const GridSpec& grid = {});

// Trimming bounds by direct mass allocation: place the subgroup's omega of
// probability mass on the two outcome atoms, zeros-first for the lower
// bound and ones-first for the upper. Independent of the closed form.
FeasibleInterval enumerate_trim(double p, double omega);

}  // namespace strata_bounds::oracle
