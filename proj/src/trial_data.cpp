#include "strata_bounds/trial_data.hpp"

#include <string>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

void TrialCounts::validate() const {
  if (arms.size() < 2) {
    throw InputError("need at least two arms, got " + std::to_string(arms.size()));
  }
  for (std::size_t z = 0; z < arms.size(); ++z) {
    const ArmCounts& a = arms[z];
    auto bad = [&](const char* field, std::int64_t v) {
      throw InputError("arm " + std::to_string(z) + ": " + field +
                       " must be nonnegative, got " + std::to_string(v));
    };
    if (a.survived_y1 < 0) bad("survived_y1", a.survived_y1);
    if (a.survived_y0 < 0) bad("survived_y0", a.survived_y0);
    if (a.died < 0) bad("died", a.died);
    if (a.survived_y_missing < 0) bad("survived_y_missing", a.survived_y_missing);
    if (a.total() == 0) {
      throw InputError("arm " + std::to_string(z) + " has no subjects");
    }
  }
}

bool ObservedDistribution::survival_monotone() const {
  for (std::size_t z = 1; z < surv.size(); ++z) {
    if (surv[z] < surv[z - 1]) return false;
  }
  return true;
}

double ObservedDistribution::mean_at(int z) const {
  if (z < 0 || z > max_level()) {
    throw InternalError("arm index " + std::to_string(z) + " out of range");
  }
  if (!outcome_mean[z].has_value()) {
    throw InputError("no recorded outcomes among survivors at arm " + std::to_string(z));
  }
  return *outcome_mean[z];
}

ObservedDistribution summarize(const TrialCounts& counts, bool drop_missing) {
  counts.validate();
  ObservedDistribution obs;
  obs.surv.reserve(counts.arms.size());
  obs.outcome_mean.reserve(counts.arms.size());
  for (const ArmCounts& a : counts.arms) {
    const std::int64_t with_outcome = a.survived_y1 + a.survived_y0;
    const std::int64_t survivors = drop_missing ? with_outcome : a.survivors();
    const std::int64_t total = drop_missing ? with_outcome + a.died : a.total();
    if (total == 0) {
      throw InputError("arm has no subjects once missing outcomes are dropped");
    }
    obs.surv.push_back(static_cast<double>(survivors) / static_cast<double>(total));
    if (with_outcome > 0) {
      obs.outcome_mean.push_back(static_cast<double>(a.survived_y1) /
                                 static_cast<double>(with_outcome));
    } else {
      obs.outcome_mean.push_back(std::nullopt);
    }
  }
  return obs;
}

}  // namespace strata_bounds
