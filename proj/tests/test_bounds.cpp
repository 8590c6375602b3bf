#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "strata_bounds/errors.hpp"
#include "strata_bounds/strata.hpp"
#include "strata_bounds/trimming.hpp"

namespace sb = strata_bounds;

namespace {

sb::ObservedDistribution worked_instance() {
  sb::ObservedDistribution obs;
  obs.surv = {0.3, 0.6, 0.9};
  obs.outcome_mean = {0.3, 0.0, 0.5};
  return obs;
}

}  // namespace

TEST_CASE("trim_bounds closed form on pinned pairs") {
  const sb::FeasibleInterval full = sb::trim_bounds(0.5, 1.0);
  CHECK(full.lo == 0.5);
  CHECK(full.hi == 0.5);

  const sb::FeasibleInterval zero = sb::trim_bounds(0.0, 0.5);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == 0.0);

  const sb::FeasibleInterval wide = sb::trim_bounds(0.5, 1.0 / 3.0);
  CHECK(wide.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wide.hi == doctest::Approx(1.0).epsilon(1e-12));

  // Degenerate input where the ratio rounds one ulp past 1.
  const sb::FeasibleInterval ones = sb::trim_bounds(1.0, 0.01);
  CHECK_FALSE(ones.is_empty);
  CHECK(ones.lo == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ones.hi == 1.0);
}

TEST_CASE("trim_bounds rejects out-of-domain arguments") {
  CHECK_THROWS_AS(sb::trim_bounds(0.5, 0.0), sb::InputError);
  CHECK_THROWS_AS(sb::trim_bounds(0.5, -0.2), sb::InputError);
  CHECK_THROWS_AS(sb::trim_bounds(0.5, 1.2), sb::InputError);
  CHECK_THROWS_AS(sb::trim_bounds(1.4, 0.5), sb::InputError);
  CHECK_THROWS_AS(sb::trim_bounds(-0.4, 0.5), sb::InputError);
  // A hair outside [0,1] is tolerated and clamped.
  CHECK_NOTHROW(sb::trim_bounds(1.0 + 1e-12, 0.5));
}

TEST_CASE("trim_bounds widens as the subgroup shrinks") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double p = uni(rng);
    double prev_lo = p;
    double prev_hi = p;
    for (double omega : {1.0, 0.8, 0.6, 0.4, 0.2, 0.05}) {
      const sb::FeasibleInterval iv = sb::trim_bounds(p, omega);
      CHECK(iv.lo <= prev_lo + 1e-12);
      CHECK(iv.hi >= prev_hi - 1e-12);
      CHECK(iv.lo >= -1e-12);
      CHECK(iv.hi <= 1.0 + 1e-12);
      prev_lo = iv.lo;
      prev_hi = iv.hi;
    }
  }
}

TEST_CASE("coarsened_mean peels identified strata off the arm mixture") {
  const sb::ObservedDistribution obs = worked_instance();
  const sb::StrataProfile profile = sb::identify_strata(obs);

  // No strata below the group: the group is the whole survivor population.
  const sb::CoarsenedMean whole = sb::coarsened_mean(obs, profile, 1, 0, {});
  CHECK(whole.status == sb::CoarsenedMean::Status::kOk);
  CHECK(whole.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(whole.weight == doctest::Approx(0.5).epsilon(1e-12));

  const sb::CoarsenedMean base = sb::coarsened_mean(obs, profile, 0, 0, {});
  CHECK(base.value == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(base.weight == 1.0);

  // Peeling stratum 0 at level 2 with its mean pinned to 0.
  const sb::CoarsenedMean peeled =
      sb::coarsened_mean(obs, profile, 2, 1, {0.0});
  CHECK(peeled.status == sb::CoarsenedMean::Status::kOk);
  CHECK(peeled.value == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(peeled.weight == doctest::Approx(0.5).epsilon(1e-12));

  // Peeling with the identified mean 0.3 at level 1 leaves a negative
  // remainder: the working equalities are incompatible with the data.
  const sb::CoarsenedMean broken =
      sb::coarsened_mean(obs, profile, 1, 1, {0.3});
  CHECK(broken.status == sb::CoarsenedMean::Status::kIncompatible);
  CHECK(broken.raw_value == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("coarsened_mean flags a massless group") {
  sb::ObservedDistribution obs;
  obs.surv = {0.5, 0.5};  // stratum 1 empty
  obs.outcome_mean = {0.4, 0.4};
  const sb::StrataProfile profile = sb::identify_strata(obs);
  const sb::CoarsenedMean empty = sb::coarsened_mean(obs, profile, 1, 1, {0.4});
  CHECK(empty.status == sb::CoarsenedMean::Status::kEmptyGroup);
}

TEST_CASE("marginal feasible regions for single stratum means") {
  const sb::ObservedDistribution obs = worked_instance();
  const sb::StrataProfile profile = sb::identify_strata(obs);

  const sb::FeasibleInterval top = sb::marginal_mu_interval(obs, profile, 0, 2);
  CHECK(top.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(top.hi == doctest::Approx(1.0).epsilon(1e-12));

  const sb::FeasibleInterval point = sb::marginal_mu_interval(obs, profile, 0, 0);
  CHECK(point.lo == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(point.hi == doctest::Approx(0.3).epsilon(1e-12));

  sb::ObservedDistribution whole;
  whole.surv = {0.7, 0.7};
  whole.outcome_mean = {0.25, 0.6};
  const sb::StrataProfile wp = sb::identify_strata(whole);
  const sb::FeasibleInterval w = sb::marginal_mu_interval(whole, wp, 0, 1);
  CHECK(w.lo == 0.6);  // the stratum is the entire survivor population
  CHECK(w.hi == 0.6);
  CHECK_THROWS_AS(sb::marginal_mu_interval(whole, wp, 1, 1), sb::InputError);
}

TEST_CASE("marginal contrast regions difference the endpoint intervals") {
  const sb::ObservedDistribution obs = worked_instance();
  const sb::StrataProfile profile = sb::identify_strata(obs);
  for (int stratum : {0, 1}) {
    const sb::FeasibleInterval iv = sb::marginal_contrast_interval(
        obs, profile, sb::Contrast{stratum, 2, 1});
    CHECK(iv.lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(iv.hi == doctest::Approx(1.0).epsilon(1e-12));
  }

  sb::ObservedDistribution same;
  same.surv = {1.0, 1.0};
  same.outcome_mean = {0.45, 0.45};
  const sb::StrataProfile sp = sb::identify_strata(same);
  const sb::FeasibleInterval iv =
      sb::marginal_contrast_interval(same, sp, sb::Contrast{0, 1, 0});
  CHECK(iv.lo == 0.0);
  CHECK(iv.hi == 0.0);
}

TEST_CASE("marginal regions always cover the truth on synthetic mixtures") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 3);
    // A strictly increasing survival curve with interior strata.
    std::vector<double> surv;
    double acc = 0.05 + 0.3 * uni(rng);
    for (int z = 0; z <= m; ++z) {
      surv.push_back(acc);
      acc += (0.9 - acc) * (0.2 + 0.6 * uni(rng)) / (m + 1 - z);
    }
    sb::ObservedDistribution obs;
    obs.surv = surv;
    obs.outcome_mean.resize(m + 1);
    const sb::StrataProfile profile = sb::identify_strata(obs);
    // True stratum means, mixed into each arm's observable mean.
    std::vector<std::vector<double>> mu(m + 1, std::vector<double>(m + 1));
    for (int k = 0; k <= m; ++k) {
      for (int z = k; z <= m; ++z) mu[k][z] = uni(rng);
    }
    for (int z = 0; z <= m; ++z) {
      double mixed = 0.0;
      for (int k = 0; k <= z; ++k) mixed += profile.p_cond(k, z) * mu[k][z];
      obs.outcome_mean[z] = mixed;
    }
    for (int k = 0; k < m; ++k) {
      for (int z = k; z <= m; ++z) {
        const sb::FeasibleInterval iv =
            sb::marginal_mu_interval(obs, profile, k, z);
        CHECK(iv.contains(mu[k][z], 1e-9));
      }
    }
    for (const sb::Contrast& c : sb::enumerate_contrasts(profile)) {
      const sb::FeasibleInterval iv =
          sb::marginal_contrast_interval(obs, profile, c);
      const double truth = mu[c.stratum][c.z_high] - mu[c.stratum][c.z_low];
      CHECK(iv.contains(truth, 1e-9));
    }
  }
}

TEST_CASE("interval plumbing keeps emptiness and intersection straight") {
  const sb::FeasibleInterval a = sb::FeasibleInterval::closed(0.2, 0.6);
  const sb::FeasibleInterval b = sb::FeasibleInterval::closed(0.5, 0.9);
  const sb::FeasibleInterval c = a.intersect(b);
  CHECK(c.lo == 0.5);
  CHECK(c.hi == 0.6);
  CHECK(a.intersect(sb::FeasibleInterval::closed(0.7, 0.9)).is_empty);
  CHECK(sb::FeasibleInterval::empty().intersect(a).is_empty);
  CHECK(a.contains(0.2));
  CHECK(a.contains(0.6 + 1e-10));
  CHECK_FALSE(a.contains(0.61));
  const sb::FeasibleInterval p = sb::FeasibleInterval::point(0.25);
  CHECK(p.lo == p.hi);
}
