#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "strata_bounds/strata.hpp"
#include "strata_bounds/trial_data.hpp"

namespace strata_bounds {

// Independent Dirichlet prior on each arm's cell probabilities
// (survived_y1, survived_y0, died). Survivors with a missing outcome are
// dropped before forming the posterior.
struct PriorSpec {
  std::vector<std::array<double, 3>> alpha;  // one triple per arm

  static PriorSpec uniform(int num_arms);  // all ones
  void validate(int num_arms) const;       // throws InputError
};

// Draw `index` of the posterior stream for a given seed. Each draw seeds
// its own generator from (seed, index), so any subset of the stream can be
// reproduced in any order and across any thread count.
ObservedDistribution posterior_draw(const TrialCounts& counts,
                                    const PriorSpec& prior, std::uint64_t seed,
                                    std::uint64_t index);

std::vector<ObservedDistribution> sample_posterior(const TrialCounts& counts,
                                                   const PriorSpec& prior,
                                                   int n_draws,
                                                   std::uint64_t seed);

// Keep a draw iff its survival curve is nondecreasing (ties allowed).
bool filter_monotone(const ObservedDistribution& draw);

struct CredibleInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ContrastPosterior {
  Contrast contrast;
  // Equal-tailed envelope of the per-draw bound intervals: 2.5th percentile
  // of the lower endpoints to the 97.5th percentile of the upper endpoints.
  CredibleInterval bound_ci;
  double mean_lo = 0.0;
  double mean_hi = 0.0;
};

struct PosteriorOptions {
  int n_draws = 4000;
  std::uint64_t seed = 0;
  std::optional<double> delta0;  // clinically relevant effect threshold
  double retention_floor = 0.01;
  int threads = 0;  // 0: honor STRATA_BOUNDS_THREADS, else hardware
};

struct PosteriorSummary {
  int n_drawn = 0;
  int n_retained = 0;  // draws passing the monotone filter
  double reject_prob_simultaneous = 0.0;
  double reject_prob_marginal = 0.0;
  double slb_mean = 0.0;
  double mlb_mean = 0.0;
  CredibleInterval slb_ci;  // equal-tailed 95% over retained draws
  CredibleInterval mlb_ci;
  std::vector<ContrastPosterior> contrasts;
  std::optional<double> reject_prob_clinical;  // P(slb > delta0), if requested
};

// Runs the full per-draw analysis (step-down test, marginal intervals, both
// effect lower bounds) over the retained posterior draws. Proportions are
// over retained draws. Throws InputError when retention falls below
// options.retention_floor.
PosteriorSummary summarize_posterior(const TrialCounts& counts,
                                     const PriorSpec& prior,
                                     const PosteriorOptions& options);

}  // namespace strata_bounds
