#pragma once

#include <utility>
#include <vector>

#include "strata_bounds/simplex.hpp"
#include "strata_bounds/strata.hpp"

namespace strata_bounds {

// LP encoding of the identified region of the stratum-mean array
// mu[k][z] (nonempty stratum k <= m-1, arm z = k..m):
//   for z < m:   sum_k p_cond(k, z) * mu[k][z] == m(z)
//   at z == m:   the survivor mixture leaves stratum m's share inside its
//                own [0,1] box, which bands the partial sum over k <= m-1
//   boxes:       0 <= mu[k][z] <= 1
struct PolytopeModel {
  LinearProgram lp;
  // (stratum, arm) for each LP column, in column order.
  std::vector<std::pair<int, int>> columns;
  int column_of(int stratum, int z) const;  // -1 when absent
};

// row_slack > 0 widens every mixture row into a +/- row_slack band,
// modelling distributions within row_slack of the observed one.
PolytopeModel build_polytope(const ObservedDistribution& obs,
                             const StrataProfile& profile,
                             double row_slack = 0.0);

struct DeltaMaxSolution {
  LpStatus status = LpStatus::kOptimal;
  double delta_max_slb = 0.0;
  PolytopeModel model;  // polytope plus the added gap variable
  int alpha_column = -1;
  std::vector<double> witness;     // full assignment at the optimum
  std::vector<std::string> basis;  // simplex basis certificate
};

// Sharp lower bound on the largest within-stratum effect: the smallest
// alpha such that some point of the polytope has every ordered within-
// stratum difference <= alpha. alpha >= 0 because equal arms are allowed.
DeltaMaxSolution solve_delta_max_slb(const ObservedDistribution& obs,
                                     const StrataProfile& profile);

// Whether the polytope admits a point whose stratum means are constant
// across arms (the global null). Pure phase-1 feasibility check.
bool check_h0_compatibility(const ObservedDistribution& obs,
                            const StrataProfile& profile, double tol = kOptTol,
                            double row_slack = 0.0);

}  // namespace strata_bounds
