#include "strata_bounds/datasets.hpp"

#include <cmath>
#include <string>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

TrialCounts hvtn503_cd4_gt_350() {
  TrialCounts counts;
  // Cells: CD4 above threshold, below threshold, uninfected, CD4 missing.
  counts.arms = {
      {19, 14, 363, 4},  // placebo
      {12, 4, 94, 2},    // one vaccination
      {34, 10, 243, 1},  // two or more vaccinations
  };
  return counts;
}

TrialCounts hvtn503_cd4_gt_200() {
  TrialCounts counts;
  counts.arms = {
      {29, 4, 363, 4},
      {16, 0, 94, 2},
      {44, 0, 243, 1},
  };
  return counts;
}

TrialCounts hypothetical_trial(int n1) {
  if (n1 < 0 || n1 > 40) {
    throw InputError("sim dataset needs n1 in [0, 40], got " + std::to_string(n1));
  }
  TrialCounts counts;
  counts.arms = {
      {n1, 40 - n1, 360, 0},
      {56, 24, 320, 0},
      {108, 12, 280, 0},
  };
  return counts;
}

TrialCounts scale_counts(const TrialCounts& counts, std::int64_t target_total) {
  counts.validate();
  if (target_total <= 0) {
    throw InputError("scaled trial needs a positive target size");
  }
  std::int64_t total = 0;
  for (const ArmCounts& arm : counts.arms) total += arm.total();
  const double factor =
      static_cast<double>(target_total) / static_cast<double>(total);
  TrialCounts scaled;
  scaled.arms.reserve(counts.arms.size());
  for (const ArmCounts& arm : counts.arms) {
    ArmCounts s;
    s.survived_y1 = std::llround(factor * static_cast<double>(arm.survived_y1));
    s.survived_y0 = std::llround(factor * static_cast<double>(arm.survived_y0));
    s.died = std::llround(factor * static_cast<double>(arm.died));
    s.survived_y_missing = 0;
    scaled.arms.push_back(s);
  }
  scaled.validate();
  return scaled;
}

std::optional<TrialCounts> dataset_by_name(const std::string& name,
                                           std::optional<int> n1) {
  if (name == "hvtn503-cd4-350") return hvtn503_cd4_gt_350();
  if (name == "hvtn503-cd4-200") return hvtn503_cd4_gt_200();
  if (name == "sim") {
    if (!n1) throw InputError("dataset 'sim' needs --n1");
    return hypothetical_trial(*n1);
  }
  return std::nullopt;
}

}  // namespace strata_bounds
