#include "strata_bounds/polytope.hpp"

#include <string>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

int PolytopeModel::column_of(int stratum, int z) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].first == stratum && columns[c].second == z) {
      return static_cast<int>(c);
    }
  }
  return -1;
}

PolytopeModel build_polytope(const ObservedDistribution& obs,
                             const StrataProfile& profile, double row_slack) {
  const int m = profile.max_level();
  PolytopeModel model;
  for (int k = 0; k < m; ++k) {
    if (profile.is_empty_stratum(k)) continue;
    for (int z = k; z <= m; ++z) {
      model.columns.emplace_back(k, z);
      model.lp.add_variable(
          "mu_" + stratum_label(k, m) + "_z" + std::to_string(z), 0.0, 1.0);
    }
  }
  // One survivor-mixture row per fully decomposed arm. Arms without
  // survivors carry no data and no nonempty strata, so they are skipped.
  // A positive row_slack widens each row into a band, which turns the
  // model into "within row_slack of some admissible distribution".
  for (int z = 0; z < m; ++z) {
    if (profile.surv[z] <= 0.0) continue;
    std::vector<double> row(model.columns.size(), 0.0);
    for (int k = 0; k <= z; ++k) {
      if (profile.is_empty_stratum(k)) continue;
      row[model.column_of(k, z)] = profile.p_cond(k, z);
    }
    const double rhs = obs.mean_at(z);
    if (row_slack > 0.0) {
      model.lp.add_row(row, LinearProgram::Relation::kGe, rhs - row_slack);
      model.lp.add_row(std::move(row), LinearProgram::Relation::kLe,
                       rhs + row_slack);
    } else {
      model.lp.add_row(std::move(row), LinearProgram::Relation::kEq, rhs);
    }
  }
  // At the top arm the never-survive-below stratum m is present too; its
  // unidentified mean only has to stay inside [0,1], which bands the
  // partial mixture over the comparable strata.
  if (profile.surv[m] > 0.0) {
    std::vector<double> row(model.columns.size(), 0.0);
    bool any = false;
    for (int k = 0; k < m; ++k) {
      if (profile.is_empty_stratum(k)) continue;
      row[model.column_of(k, m)] = profile.p_cond(k, m);
      any = true;
    }
    if (any) {
      const double p_top = profile.p_cond(m, m);
      const double top_mean = obs.mean_at(m);
      model.lp.add_row(row, LinearProgram::Relation::kGe,
                       std::max(0.0, top_mean - p_top) - row_slack);
      model.lp.add_row(std::move(row), LinearProgram::Relation::kLe,
                       std::min(1.0 - p_top, top_mean) + row_slack);
    }
  }
  return model;
}

DeltaMaxSolution solve_delta_max_slb(const ObservedDistribution& obs,
                                     const StrataProfile& profile) {
  DeltaMaxSolution out;
  out.model = build_polytope(obs, profile);
  LinearProgram& lp = out.model.lp;
  const int m = profile.max_level();
  out.alpha_column = lp.add_variable("alpha", 0.0, 1.0);
  for (int k = 0; k < m; ++k) {
    if (profile.is_empty_stratum(k)) continue;
    for (int z_high = k + 1; z_high <= m; ++z_high) {
      for (int z_low = k; z_low < z_high; ++z_low) {
        std::vector<double> row(lp.num_variables(), 0.0);
        row[out.model.column_of(k, z_high)] = 1.0;
        row[out.model.column_of(k, z_low)] = -1.0;
        row[out.alpha_column] = -1.0;
        lp.add_row(std::move(row), LinearProgram::Relation::kLe, 0.0);
      }
    }
  }
  std::vector<double> objective(lp.num_variables(), 0.0);
  objective[out.alpha_column] = 1.0;
  lp.set_objective(std::move(objective));

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw InternalError("effect-bound program should be feasible and bounded "
                        "for any monotone distribution");
  }
  out.status = sol.status;
  out.delta_max_slb = sol.objective_value;
  out.witness = sol.assignment;
  out.basis = sol.basis;
  return out;
}

bool check_h0_compatibility(const ObservedDistribution& obs,
                            const StrataProfile& profile, double tol,
                            double row_slack) {
  PolytopeModel model = build_polytope(obs, profile, row_slack);
  LinearProgram& lp = model.lp;
  const int m = profile.max_level();
  for (int k = 0; k < m; ++k) {
    if (profile.is_empty_stratum(k)) continue;
    for (int z = k + 1; z <= m; ++z) {
      std::vector<double> row(lp.num_variables(), 0.0);
      row[model.column_of(k, z)] = 1.0;
      row[model.column_of(k, k)] = -1.0;
      lp.add_row(std::move(row), LinearProgram::Relation::kEq, 0.0);
    }
  }
  return solve_lp(lp, tol).status != LpStatus::kInfeasible;
}

}  // namespace strata_bounds
