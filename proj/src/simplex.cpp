#include "strata_bounds/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

int LinearProgram::add_variable(std::string name, double lower, double upper) {
  if (!(lower <= upper)) {
    throw InternalError("variable " + name + " has empty box");
  }
  if (!std::isfinite(lower)) {
    throw InternalError("variable " + name + " needs a finite lower bound");
  }
  vars_.push_back({std::move(name), lower, upper});
  for (Row& row : rows_) row.coeffs.resize(vars_.size(), 0.0);
  objective_.resize(vars_.size(), 0.0);
  return static_cast<int>(vars_.size()) - 1;
}

void LinearProgram::add_row(std::vector<double> coeffs, Relation rel, double rhs) {
  if (coeffs.size() > vars_.size()) {
    throw InternalError("row has more coefficients than variables");
  }
  coeffs.resize(vars_.size(), 0.0);
  rows_.push_back({std::move(coeffs), rel, rhs});
}

void LinearProgram::set_objective(std::vector<double> coeffs) {
  if (coeffs.size() > vars_.size()) {
    throw InternalError("objective has more coefficients than variables");
  }
  coeffs.resize(vars_.size(), 0.0);
  objective_ = std::move(coeffs);
}

std::string LinearProgram::to_lp_format() const {
  std::ostringstream out;
  out.precision(17);
  auto term = [&](double c, const std::string& name, bool first) {
    if (first) {
      out << ' ' << c << ' ' << name;
    } else {
      out << (c < 0 ? " - " : " + ") << std::abs(c) << ' ' << name;
    }
  };
  out << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < num_variables(); ++j) {
    if (objective_[j] == 0.0) continue;
    term(objective_[j], vars_[j].name, first);
    first = false;
  }
  if (first) out << " 0 " << (vars_.empty() ? "x" : vars_[0].name);
  out << "\nSubject To\n";
  for (int i = 0; i < num_rows(); ++i) {
    out << " c" << i << ':';
    first = true;
    for (int j = 0; j < num_variables(); ++j) {
      if (rows_[i].coeffs[j] == 0.0) continue;
      term(rows_[i].coeffs[j], vars_[j].name, first);
      first = false;
    }
    if (first) out << " 0 " << (vars_.empty() ? "x" : vars_[0].name);
    const char* rel = rows_[i].rel == Relation::kLe   ? "<="
                      : rows_[i].rel == Relation::kGe ? ">="
                                                      : "=";
    out << ' ' << rel << ' ' << rows_[i].rhs << '\n';
  }
  out << "Bounds\n";
  for (const Variable& v : vars_) {
    if (std::isinf(v.upper)) {
      out << ' ' << v.lower << " <= " << v.name << '\n';
    } else {
      out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
    }
  }
  out << "End\n";
  return out.str();
}

namespace {

// Bounded-variable primal simplex over the full dense tableau. Variables
// carry a status; nonbasic variables sit at a finite bound. The tableau is
// kept as B^-1 A with B^-1 b alongside; basic values are recomputed from
// the nonbasic bound values every iteration, which is cheap at the sizes
// this project builds and avoids incremental drift.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, double tol) : tol_(tol) {
    n_struct_ = lp.num_variables();
    const int m = lp.num_rows();
    // Normalize rows to <= / == with ge rows negated, then append one
    // slack per inequality and one artificial per row.
    std::vector<std::vector<double>> coeffs(m);
    std::vector<double> rhs(m);
    std::vector<bool> is_eq(m);
    for (int i = 0; i < m; ++i) {
      const auto& row = lp.rows()[i];
      coeffs[i] = row.coeffs;
      rhs[i] = row.rhs;
      is_eq[i] = row.rel == LinearProgram::Relation::kEq;
      if (row.rel == LinearProgram::Relation::kGe) {
        for (double& c : coeffs[i]) c = -c;
        rhs[i] = -rhs[i];
      }
    }
    int n_slack = 0;
    for (int i = 0; i < m; ++i) {
      if (!is_eq[i]) ++n_slack;
    }
    n_total_ = n_struct_ + n_slack + m;
    first_artificial_ = n_struct_ + n_slack;
    lower_.assign(n_total_, 0.0);
    upper_.assign(n_total_, kLpInfinity);
    names_.resize(n_total_);
    for (int j = 0; j < n_struct_; ++j) {
      lower_[j] = lp.variables()[j].lower;
      upper_[j] = lp.variables()[j].upper;
      names_[j] = lp.variables()[j].name;
    }
    tab_.assign(m, std::vector<double>(n_total_, 0.0));
    rhs_.assign(m, 0.0);
    basic_.resize(m);
    status_.assign(n_total_, kAtLower);
    int slack = n_struct_;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n_struct_; ++j) tab_[i][j] = coeffs[i][j];
      rhs_[i] = rhs[i];
      if (!is_eq[i]) {
        tab_[i][slack] = 1.0;
        names_[slack] = "slack_r" + std::to_string(i);
        ++slack;
      }
    }
    for (int i = 0; i < m; ++i) {
      names_[first_artificial_ + i] = "art_r" + std::to_string(i);
    }
    // Orient each row so the artificial starts at a nonnegative value, and
    // install the artificial basis.
    for (int i = 0; i < m; ++i) {
      double residual = rhs_[i];
      for (int j = 0; j < first_artificial_; ++j) {
        residual -= tab_[i][j] * lower_[j];
      }
      if (residual < 0.0) {
        for (double& c : tab_[i]) c = -c;
        rhs_[i] = -rhs_[i];
      }
      tab_[i][first_artificial_ + i] = 1.0;
      basic_[i] = first_artificial_ + i;
      status_[first_artificial_ + i] = kBasic;
    }
  }

  // Minimizes `cost` (indexed over all tableau columns) from the current
  // basis. Returns kOptimal or kUnbounded.
  LpStatus run(const std::vector<double>& cost, bool allow_artificials) {
    const int m = num_rows();
    const long max_iters = 2000 + 200L * (n_total_ + m);
    for (long iter = 0; iter < max_iters; ++iter) {
      std::vector<double> x_basic = basic_values();
      // Reduced costs via the basic cost multipliers.
      std::vector<double> reduced(n_total_);
      for (int j = 0; j < n_total_; ++j) {
        double r = cost[j];
        for (int i = 0; i < m; ++i) r -= cost[basic_[i]] * tab_[i][j];
        reduced[j] = r;
      }
      int entering = -1;
      int direction = 0;
      for (int j = 0; j < n_total_; ++j) {
        if (status_[j] == kBasic) continue;
        if (!allow_artificials && j >= first_artificial_) continue;
        if (upper_[j] - lower_[j] <= 0.0) continue;  // fixed
        if (status_[j] == kAtLower && reduced[j] < -tol_) {
          entering = j;
          direction = +1;
          break;
        }
        if (status_[j] == kAtUpper && reduced[j] > tol_) {
          entering = j;
          direction = -1;
          break;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      double t_max = upper_[entering] - lower_[entering];
      int leave_row = -1;
      bool leave_to_upper = false;
      for (int i = 0; i < m; ++i) {
        const double d = tab_[i][entering] * direction;
        double limit;
        bool to_upper;
        if (d > tol_) {
          limit = std::max(0.0, (x_basic[i] - lower_[basic_[i]]) / d);
          to_upper = false;
        } else if (d < -tol_) {
          if (std::isinf(upper_[basic_[i]])) continue;
          limit = std::max(0.0, (upper_[basic_[i]] - x_basic[i]) / (-d));
          to_upper = true;
        } else {
          continue;
        }
        // Bland: take a strictly tighter limit, or break a tolerance-tie
        // toward the smaller variable index.
        const bool tighter = limit < t_max - tol_;
        const bool tied = leave_row >= 0 && limit <= t_max + tol_ &&
                          basic_[i] < basic_[leave_row];
        if (tighter || tied) {
          t_max = std::min(t_max, limit);
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (std::isinf(t_max)) return LpStatus::kUnbounded;
      if (leave_row < 0) {
        // The entering variable runs to its other bound; the basis stays.
        status_[entering] = status_[entering] == kAtLower ? kAtUpper : kAtLower;
        continue;
      }
      const int leaving = basic_[leave_row];
      status_[leaving] = leave_to_upper ? kAtUpper : kAtLower;
      pivot(leave_row, entering);
    }
    throw InternalError("simplex iteration guard tripped; possible cycling");
  }

  // Phase-1 objective: total artificial mass.
  std::vector<double> artificial_cost() const {
    std::vector<double> cost(n_total_, 0.0);
    for (int j = first_artificial_; j < n_total_; ++j) cost[j] = 1.0;
    return cost;
  }

  std::vector<double> structural_cost(const std::vector<double>& c) const {
    std::vector<double> cost(n_total_, 0.0);
    std::copy(c.begin(), c.end(), cost.begin());
    return cost;
  }

  double objective_of(const std::vector<double>& cost) {
    std::vector<double> x = current_point();
    double v = 0.0;
    for (int j = 0; j < n_total_; ++j) v += cost[j] * x[j];
    return v;
  }

  // Drives still-basic artificials out of the basis where possible; rows
  // that cannot release their artificial are redundant and stay inert.
  void retire_artificials() {
    for (int i = 0; i < num_rows(); ++i) {
      if (basic_[i] < first_artificial_) continue;
      int col = -1;
      for (int j = 0; j < first_artificial_; ++j) {
        if (status_[j] == kBasic) continue;
        if (upper_[j] - lower_[j] <= 0.0) continue;
        if (std::abs(tab_[i][j]) > tol_) {
          col = j;
          break;
        }
      }
      if (col < 0) continue;
      status_[basic_[i]] = kAtLower;
      pivot(i, col);
    }
  }

  std::vector<double> current_point() {
    std::vector<double> x(n_total_);
    for (int j = 0; j < n_total_; ++j) {
      x[j] = status_[j] == kAtUpper ? upper_[j] : lower_[j];
    }
    std::vector<double> x_basic = basic_values();
    for (int i = 0; i < num_rows(); ++i) x[basic_[i]] = x_basic[i];
    return x;
  }

  std::vector<std::string> basis_names() const {
    std::vector<std::string> names;
    names.reserve(basic_.size());
    for (int b : basic_) names.push_back(names_[b]);
    return names;
  }

  int num_rows() const { return static_cast<int>(tab_.size()); }
  int num_structural() const { return n_struct_; }

 private:
  enum Status { kBasic, kAtLower, kAtUpper };

  std::vector<double> basic_values() const {
    const int m = num_rows();
    std::vector<double> x_basic(m);
    for (int i = 0; i < m; ++i) {
      double v = rhs_[i];
      for (int j = 0; j < n_total_; ++j) {
        if (status_[j] == kBasic) continue;
        const double bound = status_[j] == kAtUpper ? upper_[j] : lower_[j];
        if (bound != 0.0) v -= tab_[i][j] * bound;
      }
      x_basic[i] = v;
    }
    return x_basic;
  }

  void pivot(int row, int col) {
    const double p = tab_[row][col];
    for (double& c : tab_[row]) c /= p;
    rhs_[row] /= p;
    for (int i = 0; i < num_rows(); ++i) {
      if (i == row) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j < n_total_; ++j) tab_[i][j] -= f * tab_[row][j];
      rhs_[i] -= f * rhs_[row];
    }
    basic_[row] = col;
    status_[col] = kBasic;
  }

  double tol_;
  int n_struct_ = 0;
  int n_total_ = 0;
  int first_artificial_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<double> rhs_;
  std::vector<int> basic_;
  std::vector<Status> status_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::string> names_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  LpSolution solution;
  if (lp.num_variables() == 0) {
    solution.status = lp.num_rows() == 0 ? LpStatus::kOptimal : LpStatus::kInfeasible;
    return solution;
  }
  Tableau tableau(lp, tol);
  const std::vector<double> phase1 = tableau.artificial_cost();
  if (tableau.run(phase1, /*allow_artificials=*/true) != LpStatus::kOptimal) {
    throw InternalError("phase-1 objective is bounded by construction");
  }
  if (tableau.objective_of(phase1) > tol) {
    solution.status = LpStatus::kInfeasible;
    return solution;
  }
  tableau.retire_artificials();
  const std::vector<double> phase2 = tableau.structural_cost(lp.objective());
  const LpStatus status = tableau.run(phase2, /*allow_artificials=*/false);
  solution.status = status;
  if (status != LpStatus::kOptimal) return solution;
  const std::vector<double> point = tableau.current_point();
  solution.assignment.assign(point.begin(), point.begin() + lp.num_variables());
  solution.objective_value = 0.0;
  for (int j = 0; j < lp.num_variables(); ++j) {
    solution.objective_value += lp.objective()[j] * solution.assignment[j];
  }
  solution.basis = tableau.basis_names();
  return solution;
}

}  // namespace strata_bounds
