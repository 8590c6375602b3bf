#include "strata_bounds/strata.hpp"

#include <string>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

bool StrataProfile::is_empty_stratum(int k, double tol) const {
  return pi.at(k) <= tol;
}

double StrataProfile::p_cond(int k, int z) const {
  if (k < 0 || z > max_level() || k > z) {
    throw InternalError("p_cond requires 0 <= stratum <= arm <= m");
  }
  if (surv[z] <= 0.0) {
    throw InternalError("p_cond undefined: no survivors at arm " + std::to_string(z));
  }
  return pi[k] / surv[z];
}

std::string stratum_label(int stratum, int max_level) {
  std::string label;
  for (int z = 0; z <= max_level; ++z) {
    label += (z < stratum) ? 'D' : 'L';
  }
  return label;
}

StrataProfile identify_strata(const ObservedDistribution& obs) {
  if (!obs.survival_monotone()) {
    throw MonotonicityError("survival decreases with the treatment level; "
                            "stratum proportions are not identified");
  }
  const int m = obs.max_level();
  StrataProfile profile;
  profile.surv = obs.surv;
  profile.pi.resize(m + 2);
  profile.pi[0] = obs.surv[0];
  for (int k = 1; k <= m; ++k) {
    profile.pi[k] = obs.surv[k] - obs.surv[k - 1];
  }
  profile.pi[m + 1] = 1.0 - obs.surv[m];
  return profile;
}

std::vector<Contrast> enumerate_contrasts(const StrataProfile& profile, double tol) {
  const int m = profile.max_level();
  std::vector<Contrast> contrasts;
  for (int k = 0; k + 1 <= m; ++k) {
    if (profile.is_empty_stratum(k, tol)) continue;
    for (int z_high = k + 1; z_high <= m; ++z_high) {
      for (int z_low = k; z_low < z_high; ++z_low) {
        contrasts.push_back({k, z_high, z_low});
      }
    }
  }
  return contrasts;
}

}  // namespace strata_bounds
