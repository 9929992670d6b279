#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hindsight::milp {

enum class Sense { kLe, kGe, kEq };

struct Row {
  std::vector<std::pair<int, double>> coefs;  // (variable index, coefficient)
  Sense sense = Sense::kLe;
  double rhs = 0.0;
  std::string tag;  // which constraint family produced the row
};

/// maximize objective . x + constant  subject to rows and lower <= x <= upper;
/// variables flagged integer must take integral values.
struct Problem {
  std::vector<double> objective;
  double constant = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int add_var(double obj, double lo, double hi, bool is_integer);
  void add_row(Row row) { rows.push_back(std::move(row)); }
};

inline constexpr double kTol = 1e-9;

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kOptimal;
  double value = 0.0;  // includes the constant
  std::vector<double> x;
  long long pivots = 0;
};

/// LP relaxation with per-variable bounds overriding problem.lower/upper.
/// Dense two-phase bounded-variable primal simplex, Bland's rule.
LpResult solve_lp(const Problem& problem, const std::vector<double>& lower, const std::vector<double>& upper);
LpResult solve_lp(const Problem& problem);

struct MilpOptions {
  long long node_budget = 200'000;
  /// Known feasible solution used as the starting incumbent.
  std::optional<std::vector<double>> warm_start;
};

struct MilpResult {
  double value = 0.0;
  std::vector<double> x;
  bool exact = true;
  long long nodes = 0;
  double bound = 0.0;  // best proven upper bound
};

/// Best-first branch-and-bound; branches on the most fractional integer
/// variable (lowest index on ties), children explored down-branch first.
/// Throws Infeasible, or BudgetExceeded when the budget runs out before any
/// integral solution is found.
MilpResult solve_milp(const Problem& problem, const MilpOptions& options = {});

/// Largest absolute constraint / bound violation of x.
double max_violation(const Problem& problem, const std::vector<double>& x);
double evaluate(const Problem& problem, const std::vector<double>& x);

}  // namespace hindsight::milp
