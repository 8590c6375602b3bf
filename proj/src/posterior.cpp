#include "strata_bounds/posterior.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include "strata_bounds/errors.hpp"
#include "strata_bounds/stepdown.hpp"
#include "strata_bounds/polytope.hpp"
#include "strata_bounds/trimming.hpp"

namespace strata_bounds {

namespace {

// SplitMix64 finalizer over (seed, index): decorrelates consecutive draw
// indices so each draw owns an independent generator.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller without the cached spare, so consumption per call is fixed.
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Marsaglia-Tsang squeeze; hand-rolled so draws are identical across
// standard libraries.
double gamma_draw(std::mt19937_64& rng, double shape) {
  if (shape < 1.0) {
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = standard_normal(rng);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

}  // namespace

PriorSpec PriorSpec::uniform(int num_arms) {
  PriorSpec prior;
  prior.alpha.assign(num_arms, {1.0, 1.0, 1.0});
  return prior;
}

void PriorSpec::validate(int num_arms) const {
  if (static_cast<int>(alpha.size()) != num_arms) {
    throw InputError("prior has " + std::to_string(alpha.size()) +
                     " arm triples but the trial has " + std::to_string(num_arms));
  }
  for (const auto& triple : alpha) {
    for (double a : triple) {
      if (!(a > 0.0)) {
        throw InputError("prior concentrations must be positive");
      }
    }
  }
}

ObservedDistribution posterior_draw(const TrialCounts& counts,
                                    const PriorSpec& prior, std::uint64_t seed,
                                    std::uint64_t index) {
  const int arms = static_cast<int>(counts.arms.size());
  std::mt19937_64 rng(mix_seed(seed, index));
  ObservedDistribution draw;
  draw.surv.reserve(arms);
  draw.outcome_mean.reserve(arms);
  for (int z = 0; z < arms; ++z) {
    const ArmCounts& cell = counts.arms[z];
    const auto& a = prior.alpha[z];
    const double g1 = gamma_draw(rng, a[0] + static_cast<double>(cell.survived_y1));
    const double g2 = gamma_draw(rng, a[1] + static_cast<double>(cell.survived_y0));
    const double g3 = gamma_draw(rng, a[2] + static_cast<double>(cell.died));
    const double total = g1 + g2 + g3;
    const double survivors = g1 + g2;
    draw.surv.push_back(survivors / total);
    if (survivors > 0.0) {
      draw.outcome_mean.push_back(g1 / survivors);
    } else {
      draw.outcome_mean.push_back(std::nullopt);
    }
  }
  return draw;
}

namespace {

// The posterior path tolerates empty arms (the prior carries them), so it
// checks less than TrialCounts::validate.
void validate_for_posterior(const TrialCounts& counts, const PriorSpec& prior) {
  if (counts.arms.size() < 2) {
    throw InputError("need at least two arms");
  }
  for (std::size_t z = 0; z < counts.arms.size(); ++z) {
    const ArmCounts& a = counts.arms[z];
    if (a.survived_y1 < 0 || a.survived_y0 < 0 || a.died < 0 ||
        a.survived_y_missing < 0) {
      throw InputError("arm " + std::to_string(z) + " has a negative count");
    }
  }
  prior.validate(static_cast<int>(counts.arms.size()));
}

}  // namespace

std::vector<ObservedDistribution> sample_posterior(const TrialCounts& counts,
                                                   const PriorSpec& prior,
                                                   int n_draws,
                                                   std::uint64_t seed) {
  validate_for_posterior(counts, prior);
  std::vector<ObservedDistribution> draws;
  draws.reserve(n_draws);
  for (int i = 0; i < n_draws; ++i) {
    draws.push_back(posterior_draw(counts, prior, seed, i));
  }
  return draws;
}

bool filter_monotone(const ObservedDistribution& draw) {
  return draw.survival_monotone();
}

namespace {

struct DrawOutcome {
  bool retained = false;
  bool sim_reject = false;
  bool marg_reject = false;
  double slb = 0.0;
  double mlb = 0.0;
  std::vector<std::pair<double, double>> contrast_bounds;
};

// Fixed contrast grid for an m+1 arm trial; per-draw emptiness is handled
// at evaluation time.
std::vector<Contrast> all_contrasts(int m) {
  std::vector<Contrast> contrasts;
  for (int k = 0; k < m; ++k) {
    for (int z_high = k + 1; z_high <= m; ++z_high) {
      for (int z_low = k; z_low < z_high; ++z_low) {
        contrasts.push_back({k, z_high, z_low});
      }
    }
  }
  return contrasts;
}

DrawOutcome evaluate_draw(const ObservedDistribution& draw,
                          const std::vector<Contrast>& contrasts) {
  DrawOutcome out;
  if (!filter_monotone(draw)) return out;
  out.retained = true;
  const StrataProfile profile = identify_strata(draw);
  out.sim_reject = test_global(draw, profile).rejected;
  out.slb = solve_delta_max_slb(draw, profile).delta_max_slb;
  out.contrast_bounds.reserve(contrasts.size());
  for (const Contrast& c : contrasts) {
    FeasibleInterval iv = FeasibleInterval::closed(-1.0, 1.0);
    // A stratum that happens to be empty in this draw constrains nothing.
    if (!profile.is_empty_stratum(c.stratum)) {
      iv = marginal_contrast_interval(draw, profile, c);
    }
    out.contrast_bounds.emplace_back(iv.lo, iv.hi);
    if (iv.lo > kOptTol || iv.hi < -kOptTol) out.marg_reject = true;
    out.mlb = std::max(out.mlb, std::max(0.0, iv.lo));
  }
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InternalError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (h - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

int resolve_threads(int requested, int n_draws) {
  int threads = requested;
  if (threads <= 0) {
    if (const char* env = std::getenv("STRATA_BOUNDS_THREADS")) {
      threads = std::atoi(env);
    }
  }
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::max(1, std::min(threads, n_draws));
}

}  // namespace

PosteriorSummary summarize_posterior(const TrialCounts& counts,
                                     const PriorSpec& prior,
                                     const PosteriorOptions& options) {
  validate_for_posterior(counts, prior);
  if (options.n_draws <= 0) {
    throw InputError("need a positive number of posterior draws");
  }
  const int m = counts.max_level();
  const std::vector<Contrast> contrasts = all_contrasts(m);
  const int n = options.n_draws;

  std::vector<DrawOutcome> outcomes(n);
  const int threads = resolve_threads(options.threads, n);
  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= n) return;
      try {
        outcomes[i] = evaluate_draw(
            posterior_draw(counts, prior, options.seed, i), contrasts);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  PosteriorSummary summary;
  summary.n_drawn = n;
  std::vector<double> slbs, mlbs;
  std::vector<std::vector<double>> los(contrasts.size()), his(contrasts.size());
  int sim = 0, marg = 0, clinical = 0;
  for (const DrawOutcome& out : outcomes) {
    if (!out.retained) continue;
    ++summary.n_retained;
    sim += out.sim_reject ? 1 : 0;
    marg += out.marg_reject ? 1 : 0;
    slbs.push_back(out.slb);
    mlbs.push_back(out.mlb);
    if (options.delta0 && out.slb > *options.delta0) ++clinical;
    for (std::size_t c = 0; c < contrasts.size(); ++c) {
      los[c].push_back(out.contrast_bounds[c].first);
      his[c].push_back(out.contrast_bounds[c].second);
    }
  }
  const double floor_count = options.retention_floor * n;
  if (summary.n_retained < floor_count || summary.n_retained == 0) {
    throw InputError(
        "only " + std::to_string(summary.n_retained) + " of " +
        std::to_string(n) +
        " posterior draws have a monotone survival curve; the monotone "
        "model is at odds with the data");
  }
  const double r = summary.n_retained;
  summary.reject_prob_simultaneous = sim / r;
  summary.reject_prob_marginal = marg / r;
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  summary.slb_mean = mean_of(slbs);
  summary.mlb_mean = mean_of(mlbs);
  summary.slb_ci = {quantile(slbs, 0.025), quantile(slbs, 0.975)};
  summary.mlb_ci = {quantile(mlbs, 0.025), quantile(mlbs, 0.975)};
  summary.contrasts.reserve(contrasts.size());
  for (std::size_t c = 0; c < contrasts.size(); ++c) {
    ContrastPosterior cp;
    cp.contrast = contrasts[c];
    cp.bound_ci = {quantile(los[c], 0.025), quantile(his[c], 0.975)};
    cp.mean_lo = mean_of(los[c]);
    cp.mean_hi = mean_of(his[c]);
    summary.contrasts.push_back(cp);
  }
  if (options.delta0) {
    summary.reject_prob_clinical = clinical / r;
  }
  return summary;
}

}  // namespace strata_bounds
