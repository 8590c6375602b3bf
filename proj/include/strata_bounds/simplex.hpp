#pragma once

#include <limits>
#include <string>
#include <vector>

namespace strata_bounds {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

// Dense linear program over box-bounded variables: minimize c'x subject to
// row constraints and lower <= x <= upper. Lower bounds must be finite;
// upper bounds may be +infinity.
class LinearProgram {
 public:
  enum class Relation { kLe, kGe, kEq };

  struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
  };

  struct Row {
    std::vector<double> coeffs;  // one per variable
    Relation rel = Relation::kEq;
    double rhs = 0.0;
  };

  int add_variable(std::string name, double lower, double upper);
  // coeffs shorter than the variable count are zero-extended.
  void add_row(std::vector<double> coeffs, Relation rel, double rhs);
  void set_objective(std::vector<double> coeffs);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }

  // CPLEX LP-format text, for debugging against external solvers.
  std::string to_lp_format() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::vector<double> objective_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  double objective_value = 0.0;
  std::vector<double> assignment;  // one entry per variable when optimal
  std::vector<std::string> basis;  // names of basic variables, row order
};

// Bounded-variable primal simplex on the dense tableau. Entering and
// leaving choices follow Bland's rule, so runs are deterministic and
// cycling-free. Feasibility comes from a phase-1 artificial objective,
// declared feasible iff its optimum is <= tol.
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9);

}  // namespace strata_bounds
