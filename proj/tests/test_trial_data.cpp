#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "strata_bounds/datasets.hpp"
#include "strata_bounds/errors.hpp"
#include "strata_bounds/strata.hpp"
#include "strata_bounds/trial_data.hpp"

namespace sb = strata_bounds;

namespace {

sb::TrialCounts two_arm(sb::ArmCounts a, sb::ArmCounts b) {
  sb::TrialCounts counts;
  counts.arms = {a, b};
  return counts;
}

std::vector<double> random_monotone_surv(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> gap(0.0, 1.0);
  std::vector<double> raw(m + 2);
  double total = 0.0;
  for (double& g : raw) {
    g = gap(rng) + 1e-3;
    total += g;
  }
  std::vector<double> surv;
  double acc = 0.0;
  for (int z = 0; z <= m; ++z) {
    acc += raw[z] / total;
    surv.push_back(acc);
  }
  return surv;
}

}  // namespace

TEST_CASE("trial counts validate their shape") {
  sb::TrialCounts counts;
  counts.arms = {{1, 1, 1, 0}};
  CHECK_THROWS_AS(counts.validate(), sb::InputError);  // one arm

  counts.arms = {{1, 1, 1, 0}, {0, 0, 0, 0}};
  CHECK_THROWS_AS(counts.validate(), sb::InputError);  // empty arm

  counts.arms = {{1, 1, 1, 0}, {-1, 2, 1, 0}};
  CHECK_THROWS_AS(counts.validate(), sb::InputError);  // negative cell

  counts.arms = {{1, 1, 1, 0}, {2, 0, 1, 3}};
  CHECK_NOTHROW(counts.validate());
}

TEST_CASE("summarize reproduces the survival and outcome ratios") {
  const sb::TrialCounts hvtn = sb::hvtn503_cd4_gt_200();
  const sb::ObservedDistribution obs = sb::summarize(hvtn);
  CHECK(obs.surv[0] == doctest::Approx(33.0 / 396.0).epsilon(1e-12));
  CHECK(obs.outcome_mean[0].value() ==
        doctest::Approx(29.0 / 33.0).epsilon(1e-12));

  const sb::ObservedDistribution with_missing = sb::summarize(hvtn, false);
  CHECK(with_missing.surv[0] == doctest::Approx(37.0 / 400.0).epsilon(1e-12));
  CHECK(with_missing.surv[1] == doctest::Approx(18.0 / 112.0).epsilon(1e-12));
  CHECK(with_missing.surv[2] == doctest::Approx(45.0 / 288.0).epsilon(1e-12));
  // The outcome mean never includes unrecorded outcomes.
  CHECK(with_missing.outcome_mean[0].value() ==
        doctest::Approx(29.0 / 33.0).epsilon(1e-12));

  const sb::ObservedDistribution flat =
      sb::summarize(two_arm({0, 5, 5, 0}, {5, 0, 0, 0}));
  CHECK(flat.surv[0] == 0.5);
  CHECK(flat.outcome_mean[0].value() == 0.0);
  CHECK(flat.surv[1] == 1.0);
  CHECK(flat.outcome_mean[1].value() == 1.0);
}

TEST_CASE("summarize flags arms without survivors instead of erroring") {
  const sb::ObservedDistribution obs =
      sb::summarize(two_arm({0, 0, 7, 0}, {3, 1, 3, 0}));
  CHECK(obs.surv[0] == 0.0);
  CHECK_FALSE(obs.outcome_mean[0].has_value());
  CHECK_THROWS_AS(obs.mean_at(0), sb::InputError);
  CHECK_THROWS_AS(obs.mean_at(9), sb::InternalError);  // out of range is a bug
  CHECK(obs.mean_at(1) == doctest::Approx(0.75));
}

TEST_CASE("identify_strata matches the worked three-arm proportions") {
  sb::ObservedDistribution obs;
  obs.surv = {0.3, 0.6, 0.9};
  obs.outcome_mean = {0.3, 0.0, 0.5};
  const sb::StrataProfile profile = sb::identify_strata(obs);
  REQUIRE(profile.pi.size() == 4);
  CHECK(profile.pi[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(profile.pi[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(profile.pi[2] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(profile.pi[3] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(profile.p_cond(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(profile.p_cond(0, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(profile.p_cond(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(profile.p_cond(2, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("identify_strata handles ties and real data") {
  sb::ObservedDistribution ties;
  ties.surv = {1.0, 1.0};
  ties.outcome_mean = {0.4, 0.4};
  const sb::StrataProfile profile = sb::identify_strata(ties);
  CHECK(profile.pi[0] == 1.0);
  CHECK(profile.pi[1] == 0.0);
  CHECK(profile.pi[2] == 0.0);
  CHECK(profile.is_empty_stratum(1));

  const sb::StrataProfile hvtn =
      sb::identify_strata(sb::summarize(sb::hvtn503_cd4_gt_200()));
  CHECK(hvtn.pi[0] == doctest::Approx(0.083333).epsilon(1e-4));
  CHECK(hvtn.pi[1] == doctest::Approx(0.062121).epsilon(1e-4));
  CHECK(hvtn.pi[2] == doctest::Approx(0.007856).epsilon(1e-3));
  CHECK(hvtn.pi[3] == doctest::Approx(0.846690).epsilon(1e-4));
}

TEST_CASE("identify_strata refuses non-monotone survival") {
  sb::ObservedDistribution obs;
  obs.surv = {0.5, 0.4};
  obs.outcome_mean = {0.1, 0.1};
  CHECK_FALSE(obs.survival_monotone());
  CHECK_THROWS_AS(sb::identify_strata(obs), sb::MonotonicityError);
}

TEST_CASE("proportions reconstruct the survival curve exactly") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 5);
    sb::ObservedDistribution obs;
    obs.surv = random_monotone_surv(rng, m);
    obs.outcome_mean.assign(m + 1, 0.5);
    const sb::StrataProfile profile = sb::identify_strata(obs);
    double total = 0.0;
    double acc = 0.0;
    for (double p : profile.pi) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (int z = 0; z <= m; ++z) {
      acc += profile.pi[z];
      CHECK(std::abs(acc - obs.surv[z]) <= 1e-12);
      // Survivor composition at each arm is a full probability vector.
      double mass = 0.0;
      for (int k = 0; k <= z; ++k) mass += profile.p_cond(k, z);
      CHECK(std::abs(mass - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("non-monotone curves always error, monotone ones never do") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 4);
    sb::ObservedDistribution obs;
    obs.surv = random_monotone_surv(rng, m);
    obs.outcome_mean.assign(m + 1, uni(rng));
    CHECK_NOTHROW(sb::identify_strata(obs));
    // Swap two adjacent distinct levels to break monotonicity.
    const int z = static_cast<int>(rng() % m);
    std::swap(obs.surv[z], obs.surv[z + 1]);
    CHECK_THROWS_AS(sb::identify_strata(obs), sb::MonotonicityError);
  }
}

TEST_CASE("contrast enumeration covers exactly the well-defined pairs") {
  sb::ObservedDistribution obs;
  obs.surv = {0.3, 0.6, 0.9};
  obs.outcome_mean = {0.3, 0.0, 0.5};
  const auto all = sb::enumerate_contrasts(sb::identify_strata(obs));
  REQUIRE(all.size() == 4);
  CHECK(all[0].stratum == 0);
  CHECK(all[0].z_high == 1);
  CHECK(all[0].z_low == 0);
  CHECK(all[1].stratum == 0);
  CHECK(all[1].z_high == 2);
  CHECK(all[1].z_low == 0);
  CHECK(all[2].stratum == 0);
  CHECK(all[2].z_high == 2);
  CHECK(all[2].z_low == 1);
  CHECK(all[3].stratum == 1);
  CHECK(all[3].z_high == 2);
  CHECK(all[3].z_low == 1);

  sb::ObservedDistribution pair;
  pair.surv = {0.4, 0.7};
  pair.outcome_mean = {0.2, 0.2};
  CHECK(sb::enumerate_contrasts(sb::identify_strata(pair)).size() == 1);

  sb::ObservedDistribution gap;  // middle stratum empty
  gap.surv = {0.3, 0.3, 0.9};
  gap.outcome_mean = {0.3, 0.3, 0.5};
  CHECK(sb::enumerate_contrasts(sb::identify_strata(gap)).size() == 3);
}

TEST_CASE("stratum labels read died-then-lived per arm") {
  CHECK(sb::stratum_label(0, 2) == "LLL");
  CHECK(sb::stratum_label(1, 2) == "DLL");
  CHECK(sb::stratum_label(2, 2) == "DDL");
  CHECK(sb::stratum_label(3, 2) == "DDD");
  CHECK(sb::stratum_label(0, 1) == "LL");
  CHECK(sb::stratum_label(2, 1) == "DD");
}

TEST_CASE("scale_counts preserves the summarized law") {
  const sb::TrialCounts base = sb::hvtn503_cd4_gt_200();
  const sb::TrialCounts scaled = sb::scale_counts(base, 3000);
  // Missing-outcome survivors are dropped, so the realized total is the
  // target times the recorded-outcome fraction, up to per-cell rounding.
  std::int64_t base_total = 0;
  std::int64_t base_known = 0;
  for (const sb::ArmCounts& arm : base.arms) {
    base_total += arm.total();
    base_known += arm.total() - arm.survived_y_missing;
  }
  std::int64_t total = 0;
  for (const sb::ArmCounts& arm : scaled.arms) {
    CHECK(arm.survived_y_missing == 0);
    total += arm.total();
  }
  const double expected = 3000.0 * base_known / base_total;
  CHECK(std::abs(total - expected) <= 0.5 * 3 * base.arms.size());
  const sb::ObservedDistribution before = sb::summarize(base);
  const sb::ObservedDistribution after = sb::summarize(scaled);
  for (int z = 0; z <= before.max_level(); ++z) {
    CHECK(after.surv[z] == doctest::Approx(before.surv[z]).epsilon(0.02));
    CHECK(after.outcome_mean[z].value() ==
          doctest::Approx(before.outcome_mean[z].value()).epsilon(0.02));
  }
  CHECK_THROWS_AS(sb::scale_counts(base, 0), sb::InputError);
}

TEST_CASE("embedded datasets match their published counts") {
  const sb::TrialCounts cd200 = sb::hvtn503_cd4_gt_200();
  REQUIRE(cd200.arms.size() == 3);
  CHECK(cd200.arms[0].survived_y1 == 29);
  CHECK(cd200.arms[0].survived_y0 == 4);
  CHECK(cd200.arms[0].died == 363);
  CHECK(cd200.arms[0].survived_y_missing == 4);
  CHECK(cd200.arms[1].survived_y1 == 16);
  CHECK(cd200.arms[2].survived_y1 == 44);

  const sb::TrialCounts sim = sb::hypothetical_trial(36);
  REQUIRE(sim.arms.size() == 3);
  CHECK(sim.arms[0].survived_y1 == 36);
  CHECK(sim.arms[0].survived_y0 == 4);
  CHECK(sim.arms[0].died == 360);
  CHECK(sim.arms[1].survived_y1 == 56);
  CHECK(sim.arms[1].survived_y0 == 24);
  CHECK(sim.arms[2].survived_y1 == 108);
  CHECK(sim.arms[2].survived_y0 == 12);
  CHECK_THROWS_AS(sb::hypothetical_trial(41), sb::InputError);
  CHECK_THROWS_AS(sb::hypothetical_trial(-1), sb::InputError);

  CHECK(sb::dataset_by_name("hvtn503-cd4-350", std::nullopt).has_value());
  CHECK_FALSE(sb::dataset_by_name("nope", std::nullopt).has_value());
  CHECK_THROWS_AS(sb::dataset_by_name("sim", std::nullopt), sb::InputError);
}
