#include "strata_bounds/trimming.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

FeasibleInterval FeasibleInterval::closed(double lo, double hi) {
  FeasibleInterval iv;
  if (lo > hi) {
    iv.is_empty = true;
    iv.lo = iv.hi = 0.0;
  } else {
    iv.lo = lo;
    iv.hi = hi;
  }
  return iv;
}

FeasibleInterval FeasibleInterval::empty() {
  FeasibleInterval iv;
  iv.is_empty = true;
  return iv;
}

bool FeasibleInterval::contains(double v, double tol) const {
  if (is_empty) return false;
  return v >= lo - tol && v <= hi + tol;
}

FeasibleInterval FeasibleInterval::intersect(const FeasibleInterval& other) const {
  if (is_empty || other.is_empty) return empty();
  return closed(std::max(lo, other.lo), std::min(hi, other.hi));
}

FeasibleInterval trim_bounds(double p, double omega) {
  if (!(p >= -kOptTol && p <= 1.0 + kOptTol)) {
    throw InputError("trim_bounds: mean " + std::to_string(p) + " outside [0,1]");
  }
  if (!(omega > 0.0)) {
    throw InputError("trim_bounds: subgroup fraction must be positive, got " +
                     std::to_string(omega));
  }
  if (omega > 1.0 + kOptTol) {
    throw InputError("trim_bounds: subgroup fraction " + std::to_string(omega) +
                     " exceeds 1");
  }
  p = std::clamp(p, 0.0, 1.0);
  omega = std::min(omega, 1.0);
  if (omega == 1.0) return FeasibleInterval::point(p);
  double lo = std::max(0.0, (p - (1.0 - omega)) / omega);
  const double hi = std::min(1.0, p / omega);
  // The exact bounds satisfy lo <= hi; division can cross them by one ulp
  // when p = 1, which closed() would misread as empty.
  lo = std::min(lo, hi);
  return FeasibleInterval::closed(lo, hi);
}

CoarsenedMean coarsened_mean(const ObservedDistribution& obs,
                             const StrataProfile& profile, int z, int l,
                             const std::vector<double>& mu_lower, double tol) {
  if (l < 0 || l > z || z > profile.max_level()) {
    throw InternalError("coarsened_mean requires 0 <= l <= z <= m");
  }
  CoarsenedMean result;
  double removed_mass = 0.0;
  double removed_mean = 0.0;
  for (int k = 0; k < l; ++k) {
    if (profile.is_empty_stratum(k)) continue;
    const double p = profile.p_cond(k, z);
    removed_mass += p;
    removed_mean += p * mu_lower.at(k);
  }
  const double group_mass = 1.0 - removed_mass;
  if (group_mass <= tol) {
    result.status = CoarsenedMean::Status::kEmptyGroup;
    return result;
  }
  result.raw_value = (obs.mean_at(z) - removed_mean) / group_mass;
  result.weight = profile.p_cond(l, z) / group_mass;
  if (result.raw_value < -tol || result.raw_value > 1.0 + tol) {
    result.status = CoarsenedMean::Status::kIncompatible;
    result.value = result.raw_value;
    return result;
  }
  result.value = std::clamp(result.raw_value, 0.0, 1.0);
  return result;
}

FeasibleInterval marginal_mu_interval(const ObservedDistribution& obs,
                                      const StrataProfile& profile, int stratum,
                                      int z) {
  if (stratum > z) {
    throw InternalError("stratum " + std::to_string(stratum) +
                        " does not survive at arm " + std::to_string(z));
  }
  if (profile.is_empty_stratum(stratum)) {
    throw InputError("stratum " + stratum_label(stratum, profile.max_level()) +
                     " is empty; its mean is undefined");
  }
  return trim_bounds(obs.mean_at(z), profile.p_cond(stratum, z));
}

FeasibleInterval marginal_contrast_interval(const ObservedDistribution& obs,
                                            const StrataProfile& profile,
                                            const Contrast& contrast) {
  const FeasibleInterval high =
      marginal_mu_interval(obs, profile, contrast.stratum, contrast.z_high);
  const FeasibleInterval low =
      marginal_mu_interval(obs, profile, contrast.stratum, contrast.z_low);
  double lo = std::max(-1.0, high.lo - low.hi);
  const double hi = std::min(1.0, high.hi - low.lo);
  lo = std::min(lo, hi);
  return FeasibleInterval::closed(lo, hi);
}

}  // namespace strata_bounds
