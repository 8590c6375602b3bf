#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace strata_bounds {

// Observed cell counts for one treatment arm.
struct ArmCounts {
  std::int64_t survived_y1 = 0;        // S=1, Y=1
  std::int64_t survived_y0 = 0;        // S=1, Y=0
  std::int64_t died = 0;               // S=0
  std::int64_t survived_y_missing = 0; // S=1, Y not recorded

  std::int64_t survivors() const { return survived_y1 + survived_y0 + survived_y_missing; }
  std::int64_t total() const { return survivors() + died; }
};

// Cell counts for every arm, indexed by treatment level z = 0..m.
struct TrialCounts {
  std::vector<ArmCounts> arms;

  int max_level() const { return static_cast<int>(arms.size()) - 1; }
  // Throws InputError unless there are >= 2 arms, every count is
  // nonnegative, and every arm has at least one subject.
  void validate() const;
};

// The identifiable summary of the observed law.
struct ObservedDistribution {
  std::vector<double> surv;                         // P(S=1 | Z=z)
  std::vector<std::optional<double>> outcome_mean;  // P(Y=1 | Z=z, S=1); nullopt when no survivors

  int max_level() const { return static_cast<int>(surv.size()) - 1; }
  bool survival_monotone() const;  // surv nondecreasing in z
  // Outcome mean at arm z; throws InternalError when undefined.
  double mean_at(int z) const;
};

// Collapses counts to per-arm survival and survivor outcome means. With
// drop_missing, survivors whose outcome was not recorded are removed from
// the arm before both ratios (missing completely at random); otherwise they
// stay in the survival numerator and denominator but never enter the
// outcome mean.
ObservedDistribution summarize(const TrialCounts& counts, bool drop_missing = true);

}  // namespace strata_bounds
