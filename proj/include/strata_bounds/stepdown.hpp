#pragma once

#include <optional>
#include <vector>

#include "strata_bounds/trimming.hpp"

namespace strata_bounds {

// One identified stratum mean under the working equalities. Values outside
// [0,1] are kept as computed and flagged instead of clamped.
struct ChainValue {
  double value = 0.0;
  bool within_unit = true;
};

// Index k -> identified mean for stratum k, or nullopt for an empty stratum.
using MuChain = std::vector<std::optional<ChainValue>>;

// Stratum means identified by peeling arms 0..stage in order, assuming the
// working equalities (each stratum's mean is constant across its surviving
// arms) at every stage up to `stage`. Requires 0 <= stage <= m.
MuChain identify_mu_chain(const ObservedDistribution& obs,
                          const StrataProfile& profile, int stage,
                          double tol = kOptTol);

// Feasible regions B for the stage's target stratum at arms z = stage..m
// (index z - stage). B at z == stage is the singleton holding the identified
// value; later arms come from trimming the coarsened group. mu_lower must
// cover strata < stage. Requires a nonempty target stratum.
std::vector<FeasibleInterval> stage_intervals(const ObservedDistribution& obs,
                                              const StrataProfile& profile,
                                              int stage, const MuChain& mu_lower,
                                              double tol = kOptTol);

struct StageRecord {
  int stage = 0;
  bool skipped = false;              // empty target stratum, no constraint imposed
  std::optional<double> identified;  // the singleton value when not skipped
  std::vector<FeasibleInterval> intervals;  // B at z = stage..m
  bool empty_intersection = false;
};

struct StepDownResult {
  bool rejected = false;
  std::optional<int> reject_stage;  // in 0..m-1 when rejected
  MuChain identified_mu;            // through the last stage reached
  std::vector<StageRecord> stages;
};

// Step-down test of the global null that no stratum mean ever varies with
// the arm. Walks stages k = 0..m; rejects at the first stage whose feasible
// regions have empty intersection; otherwise imposes the stage's working
// equality and continues. Throws MonotonicityError on a non-monotone curve.
StepDownResult test_global(const ObservedDistribution& obs,
                           const StrataProfile& profile, double tol = kOptTol);

}  // namespace strata_bounds
