#include "strata_bounds/stepdown.hpp"

#include <string>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

namespace {

// Raw chain values for coarsened_mean: empty strata hold a zero that is
// multiplied by zero conditional mass downstream.
std::vector<double> flatten(const MuChain& chain) {
  std::vector<double> flat;
  flat.reserve(chain.size());
  for (const auto& entry : chain) {
    flat.push_back(entry.has_value() ? entry->value : 0.0);
  }
  return flat;
}

}  // namespace

MuChain identify_mu_chain(const ObservedDistribution& obs,
                          const StrataProfile& profile, int stage, double tol) {
  if (stage < 0 || stage > profile.max_level()) {
    throw InternalError("chain stage " + std::to_string(stage) + " out of range");
  }
  MuChain chain;
  std::vector<double> flat;
  for (int k = 0; k <= stage; ++k) {
    if (profile.is_empty_stratum(k)) {
      chain.push_back(std::nullopt);
      flat.push_back(0.0);
      continue;
    }
    const CoarsenedMean own = coarsened_mean(obs, profile, k, k, flat, tol);
    if (own.status == CoarsenedMean::Status::kEmptyGroup) {
      throw InternalError("nonempty stratum has an empty coarsened group");
    }
    const bool within = own.raw_value >= -tol && own.raw_value <= 1.0 + tol;
    chain.push_back(ChainValue{own.raw_value, within});
    flat.push_back(own.raw_value);
  }
  return chain;
}

std::vector<FeasibleInterval> stage_intervals(const ObservedDistribution& obs,
                                              const StrataProfile& profile,
                                              int stage, const MuChain& mu_lower,
                                              double tol) {
  const int m = profile.max_level();
  if (profile.is_empty_stratum(stage)) {
    throw InternalError("stage " + std::to_string(stage) +
                        " targets an empty stratum");
  }
  const std::vector<double> flat = flatten(mu_lower);
  std::vector<FeasibleInterval> intervals;
  intervals.reserve(m - stage + 1);
  for (int z = stage; z <= m; ++z) {
    const CoarsenedMean cm = coarsened_mean(obs, profile, z, stage, flat, tol);
    switch (cm.status) {
      case CoarsenedMean::Status::kIncompatible:
        intervals.push_back(FeasibleInterval::empty());
        break;
      case CoarsenedMean::Status::kEmptyGroup:
        // Unreachable for a nonempty target stratum; impose nothing.
        intervals.push_back(FeasibleInterval::closed(0.0, 1.0));
        break;
      case CoarsenedMean::Status::kOk:
        intervals.push_back(z == stage ? FeasibleInterval::point(cm.value)
                                       : trim_bounds(cm.value, cm.weight));
        break;
    }
  }
  return intervals;
}

StepDownResult test_global(const ObservedDistribution& obs,
                           const StrataProfile& profile, double tol) {
  if (!obs.survival_monotone()) {
    throw MonotonicityError("survival decreases with the treatment level; "
                            "the step-down test is undefined");
  }
  const int m = profile.max_level();
  StepDownResult result;
  std::vector<double> flat;
  for (int k = 0; k <= m; ++k) {
    StageRecord rec;
    rec.stage = k;
    if (profile.is_empty_stratum(k)) {
      rec.skipped = true;
      result.identified_mu.push_back(std::nullopt);
      flat.push_back(0.0);
      result.stages.push_back(std::move(rec));
      continue;
    }
    rec.intervals = stage_intervals(obs, profile, k, result.identified_mu, tol);
    const CoarsenedMean own = coarsened_mean(obs, profile, k, k, flat, tol);
    rec.identified = own.raw_value;
    const bool within = own.raw_value >= -tol && own.raw_value <= 1.0 + tol;
    for (const FeasibleInterval& iv : rec.intervals) {
      if (iv.is_empty || !iv.contains(own.value, tol)) {
        rec.empty_intersection = true;
        break;
      }
    }
    result.identified_mu.push_back(ChainValue{own.raw_value, within});
    flat.push_back(own.raw_value);
    const bool empty_intersection = rec.empty_intersection;
    result.stages.push_back(std::move(rec));
    // The top stage has a singleton region only, so rejection is possible
    // at stages 0..m-1 alone.
    if (empty_intersection && k < m) {
      result.rejected = true;
      result.reject_stage = k;
      return result;
    }
  }
  return result;
}

}  // namespace strata_bounds
