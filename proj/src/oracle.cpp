#include "strata_bounds/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "strata_bounds/errors.hpp"

namespace strata_bounds::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index range of grid values inside [lo, hi], with a hair of float slack.
struct IndexRange {
  int first;
  int last;  // inclusive; first > last means empty
};

IndexRange grid_range(double lo, double hi, int points) {
  const double scale = points - 1;
  int first = static_cast<int>(std::ceil(lo * scale - 1e-9));
  int last = static_cast<int>(std::floor(hi * scale + 1e-9));
  first = std::max(first, 0);
  last = std::min(last, points - 1);
  return {first, last};
}

double grid_value(int index, int points) {
  return static_cast<double>(index) / static_cast<double>(points - 1);
}

// Row targets shared by both searches: equality rows for arms 0..m-1 and
// the band row for arm m, each widened by the grid tolerance.
struct RowBand {
  double lo;
  double hi;
};

RowBand equality_band(const ObservedDistribution& obs, int z, double tol) {
  const double target = obs.mean_at(z);
  return {target - tol, target + tol};
}

RowBand top_band(const ObservedDistribution& obs, const StrataProfile& profile,
                 double tol) {
  const int m = profile.max_level();
  const double p_top = profile.p_cond(m, m);
  const double mean = obs.mean_at(m);
  return {std::max(0.0, mean - p_top) - tol,
          std::min(1.0 - p_top, mean) + tol};
}

// Depth-first search over per-arm assignments of the stratum means,
// arm-major. At each arm every stratum but one is enumerated on the grid;
// the remaining stratum (the one with the largest mixing weight, so the
// solved value moves least per grid step) is solved from the arm's row, so
// every visited point satisfies the mixture rows exactly and the search
// minimum can only sit above the LP value, within discretization error.
class SlbSearch {
 public:
  SlbSearch(const ObservedDistribution& obs, const StrataProfile& profile,
            const GridSpec& grid)
      : obs_(obs), profile_(profile), grid_(grid), m_(profile.max_level()) {
    for (int k = 0; k < m_; ++k) {
      if (!profile.is_empty_stratum(k)) strata_.push_back(k);
    }
    min_so_far_.assign(m_, kInf);
  }

  double run() {
    if (strata_.empty()) return 0.0;
    descend_arm(0, 0.0);
    return best_;
  }

 private:
  void descend_arm(int z, double max_gap) {
    if (max_gap >= best_) return;
    if (z > m_) {
      best_ = max_gap;
      return;
    }
    std::vector<int> active;
    for (int k : strata_) {
      if (k <= z) active.push_back(k);
    }
    if (active.empty()) {
      descend_arm(z + 1, max_gap);
      return;
    }
    // Move the largest-weight stratum to the end; it closes the row.
    std::size_t close = 0;
    for (std::size_t j = 1; j < active.size(); ++j) {
      if (profile_.p_cond(active[j], z) > profile_.p_cond(active[close], z)) {
        close = j;
      }
    }
    std::swap(active[close], active.back());
    const RowBand band =
        z < m_ ? RowBand{obs_.mean_at(z), obs_.mean_at(z)}
               : top_band(obs_, profile_, 0.0);
    descend_var(z, active, 0, 0.0, band, max_gap);
  }

  void descend_var(int z, const std::vector<int>& active, std::size_t pos,
                   double partial, const RowBand& band, double max_gap) {
    if (max_gap >= best_) return;
    const int k = active[pos];
    const double coeff = profile_.p_cond(k, z);
    if (pos + 1 == active.size()) {
      // Solve the row for the closing stratum. The band is a point for
      // equality rows; for the top arm the objective never decreases in any
      // top-arm value, so the low end of the feasible range is optimal.
      double lo = (band.lo - partial) / coeff;
      const double hi = (band.hi - partial) / coeff;
      if (hi < -kOptTol || lo > 1.0 + kOptTol) return;
      lo = std::clamp(lo, 0.0, 1.0);
      const double gap = std::max(0.0, lo - min_so_far_[k]);
      const double next_gap = std::max(max_gap, gap);
      if (next_gap >= best_) return;
      const double saved = min_so_far_[k];
      min_so_far_[k] = std::min(saved, lo);
      descend_arm(z + 1, next_gap);
      min_so_far_[k] = saved;
      return;
    }
    for (int i = 0; i < grid_.points_per_axis; ++i) {
      const double v = grid_value(i, grid_.points_per_axis);
      const double gap = std::max(0.0, v - min_so_far_[k]);
      const double next_gap = std::max(max_gap, gap);
      if (next_gap >= best_) continue;
      const double saved = min_so_far_[k];
      min_so_far_[k] = std::min(saved, v);
      descend_var(z, active, pos + 1, partial + coeff * v, band, next_gap);
      min_so_far_[k] = saved;
    }
  }

  const ObservedDistribution& obs_;
  const StrataProfile& profile_;
  GridSpec grid_;
  int m_;
  std::vector<int> strata_;
  std::vector<double> min_so_far_;
  double best_ = kInf;
};

// Arm-constant search: one grid value per nonempty stratum, assigned in
// stratum order; each row is checked as soon as its strata are complete.
class NullSearch {
 public:
  NullSearch(const ObservedDistribution& obs, const StrataProfile& profile,
             const GridSpec& grid)
      : obs_(obs), profile_(profile), grid_(grid), m_(profile.max_level()) {
    for (int k = 0; k < m_; ++k) {
      if (!profile.is_empty_stratum(k)) strata_.push_back(k);
    }
  }

  bool run() {
    values_.assign(strata_.size(), 0.0);
    return descend(0);
  }

 private:
  // Mixture sum at arm z over the first `count` assigned strata.
  double row_partial(int z, std::size_t count) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      if (strata_[j] > z) break;
      sum += profile_.p_cond(strata_[j], z) * values_[j];
    }
    return sum;
  }

  bool row_holds(int z, std::size_t count) const {
    if (profile_.surv[z] <= 0.0) return true;
    const RowBand band = z < m_ ? equality_band(obs_, z, grid_.tolerance)
                                : top_band(obs_, profile_, grid_.tolerance);
    const double sum = row_partial(z, count);
    return sum >= band.lo && sum <= band.hi;
  }

  bool descend(std::size_t pos) {
    if (pos == strata_.size()) {
      // Rows past the last stratum, including the band at the top arm.
      const int from = strata_.empty() ? 0 : strata_.back() + 1;
      for (int z = from; z <= m_; ++z) {
        if (!row_holds(z, pos)) return false;
      }
      return true;
    }
    const int k = strata_[pos];
    const double coeff = profile_.p_cond(k, k);
    const double partial = row_partial(k, pos);
    const RowBand own = equality_band(obs_, k, grid_.tolerance);
    const IndexRange range =
        grid_range((own.lo - partial) / coeff, (own.hi - partial) / coeff,
                   grid_.points_per_axis);
    const int next_stratum = pos + 1 < strata_.size() ? strata_[pos + 1] : m_;
    for (int i = range.first; i <= range.last; ++i) {
      values_[pos] = grid_value(i, grid_.points_per_axis);
      bool ok = true;
      // Equality rows strictly between this stratum and the next one are
      // now complete.
      for (int z = k + 1; z < next_stratum && ok; ++z) {
        ok = row_holds(z, pos + 1);
      }
      if (ok && descend(pos + 1)) return true;
    }
    return false;
  }

  const ObservedDistribution& obs_;
  const StrataProfile& profile_;
  GridSpec grid_;
  int m_;
  std::vector<int> strata_;
  std::vector<double> values_;
};

}  // namespace

double grid_delta_max_slb(const ObservedDistribution& obs,
                          const StrataProfile& profile, const GridSpec& grid) {
  if (grid.points_per_axis < 2) {
    throw InputError("grid needs at least two points per axis");
  }
  if (profile.max_level() > 3) {
    throw InputError("the exhaustive grid search handles at most four arms");
  }
  const double best = SlbSearch(obs, profile, grid).run();
  if (best == kInf) {
    throw InputError(
        "no grid assignment satisfies the mixture rows; refine the grid");
  }
  return best;
}

bool grid_h0_compatible(const ObservedDistribution& obs,
                        const StrataProfile& profile, const GridSpec& grid) {
  if (grid.points_per_axis < 2) {
    throw InputError("grid needs at least two points per axis");
  }
  NullSearch search(obs, profile, grid);
  return search.run();
}

FeasibleInterval enumerate_trim(double p, double omega) {
  if (!(p >= -kOptTol && p <= 1.0 + kOptTol)) {
    throw InputError("enumerate_trim: mean outside [0,1]");
  }
  if (!(omega > 0.0) || omega > 1.0 + kOptTol) {
    throw InputError("enumerate_trim: subgroup fraction outside (0,1]");
  }
  p = std::clamp(p, 0.0, 1.0);
  omega = std::min(omega, 1.0);
  // The population has mass 1-p on outcome 0 and mass p on outcome 1.
  // Fill the subgroup from the zeros first for the lowest possible mean.
  const double zeros_first = std::min(1.0 - p, omega);
  const double lo = (omega - zeros_first) / omega;
  // Fill from the ones first for the highest possible mean.
  const double ones_first = std::min(p, omega);
  const double hi = ones_first / omega;
  // lo <= hi holds exactly; rounding may cross them by one ulp, which the
  // empty-normalizing constructor would misread, so build directly.
  return FeasibleInterval{std::min(lo, hi), std::max(lo, hi), false};
}

}  // namespace strata_bounds::oracle
