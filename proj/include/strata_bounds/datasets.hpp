#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "strata_bounds/trial_data.hpp"

namespace strata_bounds {

// HVTN 503 (Phambili) counts, arms z = 0 (placebo), 1 (one vaccination),
// 2 (two or more). The outcome (a 42-month CD4 threshold) exists only for
// subjects infected with HIV-1 during follow-up, so those play the S=1
// role here and the uninfected fill the `died` cell.
TrialCounts hvtn503_cd4_gt_350();
TrialCounts hvtn503_cd4_gt_200();

// Three-arm hypothetical trial, 400 subjects per arm. Arm 0 has n1
// survivors with Y=1 and 40-n1 with Y=0; arms 1 and 2 are fixed at
// (56, 24) and (108, 12) survivors out of 400. Requires 0 <= n1 <= 40.
TrialCounts hypothetical_trial(int n1);

// Rescales a trial to target_total subjects, keeping each arm's share and
// its post-drop cell frequencies fixed. Survivors with a missing outcome
// are dropped first; scaled cells are rounded to the nearest subject.
TrialCounts scale_counts(const TrialCounts& counts, std::int64_t target_total);

// Named datasets: "hvtn503-cd4-350", "hvtn503-cd4-200", "sim" (needs n1).
// Returns nullopt for an unknown name; throws InputError when "sim" is
// requested without n1.
std::optional<TrialCounts> dataset_by_name(const std::string& name,
                                           std::optional<int> n1);

}  // namespace strata_bounds
