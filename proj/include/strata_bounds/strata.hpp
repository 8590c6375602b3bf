#pragma once

#include <string>
#include <vector>

#include "strata_bounds/tolerances.hpp"
#include "strata_bounds/trial_data.hpp"

namespace strata_bounds {

// Principal-stratum proportions under monotone survival. Stratum k dies
// under arms < k and survives under arms >= k; stratum m+1 never survives.
// Invariants: pi[k] >= 0, sum(pi) == 1, sum(pi[0..z]) == surv[z].
struct StrataProfile {
  std::vector<double> pi;    // size m+2, index k
  std::vector<double> surv;  // survival curve the proportions were derived from

  int max_level() const { return static_cast<int>(surv.size()) - 1; }
  int num_strata() const { return static_cast<int>(pi.size()); }
  bool is_empty_stratum(int k, double tol = kIdentityTol) const;
  // p_cond(k, z) = P(G = k | Z = z, S = 1). Requires k <= z and surv[z] > 0.
  double p_cond(int k, int z) const;
};

// Label in died/lived letters, most restrictive arm first: for m = 2,
// stratum 1 is "DLL" (dies under z=0, lives under z=1 and z=2).
std::string stratum_label(int stratum, int max_level);

// First differences of the survival curve. Throws MonotonicityError when
// surv decreases anywhere.
StrataProfile identify_strata(const ObservedDistribution& obs);

// A within-stratum comparison of two arms under which the stratum survives.
struct Contrast {
  int stratum = 0;
  int z_high = 0;
  int z_low = 0;
};

// All contrasts with z_high > z_low >= stratum for nonempty strata that
// survive under at least two arms, ordered by (stratum, z_high, z_low).
std::vector<Contrast> enumerate_contrasts(const StrataProfile& profile,
                                          double tol = kIdentityTol);

}  // namespace strata_bounds
