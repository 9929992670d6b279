#include "hindsight/planners/milp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "hindsight/core/errors.hpp"

namespace hindsight::milp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;

enum class VarStatus { kBasic, kAtLower, kAtUpper, kFreeZero };

/// Dense bounded-variable simplex over [structural | slack | artificial].
class Simplex {
 public:
  Simplex(const Problem& p, const std::vector<double>& lower, const std::vector<double>& upper)
      : m_(static_cast<int>(p.rows.size())), n_(p.num_vars()) {
    const int total = n_ + m_ + m_;
    lo_.assign(static_cast<std::size_t>(total), 0.0);
    hi_.assign(static_cast<std::size_t>(total), 0.0);
    val_.assign(static_cast<std::size_t>(total), 0.0);
    status_.assign(static_cast<std::size_t>(total), VarStatus::kAtLower);
    tab_.assign(static_cast<std::size_t>(m_), std::vector<double>(static_cast<std::size_t>(total), 0.0));
    basis_.assign(static_cast<std::size_t>(m_), -1);
    cost_.assign(static_cast<std::size_t>(total), 0.0);

    for (int j = 0; j < n_; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      lo_[uj] = lower[uj];
      hi_[uj] = upper[uj];
      if (std::isfinite(lo_[uj])) {
        status_[uj] = VarStatus::kAtLower;
        val_[uj] = lo_[uj];
      } else if (std::isfinite(hi_[uj])) {
        status_[uj] = VarStatus::kAtUpper;
        val_[uj] = hi_[uj];
      } else {
        status_[uj] = VarStatus::kFreeZero;
        val_[uj] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = p.rows[static_cast<std::size_t>(i)];
      auto& t = tab_[static_cast<std::size_t>(i)];
      double activity = 0.0;
      for (const auto& [j, a] : row.coefs) {
        t[static_cast<std::size_t>(j)] += a;
        activity += a * val_[static_cast<std::size_t>(j)];
      }
      const auto s = static_cast<std::size_t>(n_ + i);
      const auto art = static_cast<std::size_t>(n_ + m_ + i);
      t[s] = 1.0;
      switch (row.sense) {
        case Sense::kLe: lo_[s] = 0.0; hi_[s] = kInf; break;
        case Sense::kGe: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case Sense::kEq: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
      const double r = row.rhs - activity;
      if (r >= lo_[s] - kTol && r <= hi_[s] + kTol) {
        basis_[static_cast<std::size_t>(i)] = static_cast<int>(s);
        status_[s] = VarStatus::kBasic;
        val_[s] = r;
        lo_[art] = hi_[art] = 0.0;
        status_[art] = VarStatus::kAtLower;
        continue;
      }
      // Slack parks at its bound nearest r; the artificial absorbs the rest.
      const double s0 = 0.0;
      status_[s] = row.sense == Sense::kGe ? VarStatus::kAtUpper : VarStatus::kAtLower;
      val_[s] = s0;
      const double sigma = r - s0 >= 0.0 ? 1.0 : -1.0;
      t[art] = sigma;
      // Scale the row so the artificial column is a unit column.
      for (double& v : t) v *= sigma;
      lo_[art] = 0.0;
      hi_[art] = kInf;
      basis_[static_cast<std::size_t>(i)] = static_cast<int>(art);
      status_[art] = VarStatus::kBasic;
      val_[art] = std::abs(r - s0);
      has_artificial_ = true;
    }
  }

  LpResult run(const Problem& p) {
    LpResult result;
    if (has_artificial_) {
      std::fill(cost_.begin(), cost_.end(), 0.0);
      for (int i = 0; i < m_; ++i) cost_[static_cast<std::size_t>(n_ + m_ + i)] = -1.0;
      const auto st = iterate(result.pivots);
      (void)st;
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i) infeas += val_[static_cast<std::size_t>(n_ + m_ + i)];
      if (infeas > 1e-7) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
      for (int i = 0; i < m_; ++i) {
        const auto art = static_cast<std::size_t>(n_ + m_ + i);
        hi_[art] = 0.0;
        val_[art] = std::max(0.0, std::min(val_[art], 0.0));
      }
    }
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = p.objective[static_cast<std::size_t>(j)];
    if (!iterate(result.pivots)) {
      result.status = LpStatus::kUnbounded;
      return result;
    }
    result.x.assign(val_.begin(), val_.begin() + n_);
    result.value = p.constant;
    for (int j = 0; j < n_; ++j) result.value += p.objective[static_cast<std::size_t>(j)] * result.x[static_cast<std::size_t>(j)];
    return result;
  }

 private:
  /// Primal simplex on the current cost vector; false when unbounded.
  bool iterate(long long& pivots) {
    const int total = n_ + 2 * m_;
    std::vector<double> d(static_cast<std::size_t>(total));
    for (long long guard = 0; guard < 1'000'000; ++guard) {
      for (int j = 0; j < total; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (status_[uj] == VarStatus::kBasic) {
          d[uj] = 0.0;
          continue;
        }
        double z = 0.0;
        for (int i = 0; i < m_; ++i) {
          const double tij = tab_[static_cast<std::size_t>(i)][uj];
          if (tij != 0.0) z += cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] * tij;
        }
        d[uj] = cost_[uj] - z;
      }
      // Bland: lowest-index improving variable.
      int enter = -1;
      double dir = 0.0;
      for (int j = 0; j < total; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (status_[uj] == VarStatus::kBasic || hi_[uj] - lo_[uj] <= 0.0) continue;
        if ((status_[uj] == VarStatus::kAtLower || status_[uj] == VarStatus::kFreeZero) && d[uj] > kTol) {
          enter = j;
          dir = 1.0;
          break;
        }
        if ((status_[uj] == VarStatus::kAtUpper || status_[uj] == VarStatus::kFreeZero) && d[uj] < -kTol) {
          enter = j;
          dir = -1.0;
          break;
        }
      }
      if (enter < 0) return true;
      const auto ue = static_cast<std::size_t>(enter);

      double theta = (std::isfinite(hi_[ue]) && std::isfinite(lo_[ue])) ? hi_[ue] - lo_[ue] : kInf;
      int leave_row = -1;
      bool leave_to_upper = false;
      for (int i = 0; i < m_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double g = dir * tab_[ui][ue];
        const auto b = static_cast<std::size_t>(basis_[ui]);
        double ratio = kInf;
        bool to_upper = false;
        if (g > kPivotTol && std::isfinite(lo_[b])) {
          ratio = std::max(0.0, (val_[b] - lo_[b]) / g);
        } else if (g < -kPivotTol && std::isfinite(hi_[b])) {
          ratio = std::max(0.0, (hi_[b] - val_[b]) / -g);
          to_upper = true;
        } else {
          continue;
        }
        const bool take = ratio < theta - kTol ||
                          (ratio <= theta + kTol && leave_row >= 0 &&
                           basis_[ui] < basis_[static_cast<std::size_t>(leave_row)]);
        if (take) {
          theta = ratio;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return false;

      for (int i = 0; i < m_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>(basis_[ui]);
        val_[b] -= dir * tab_[ui][ue] * theta;
      }
      val_[ue] += dir * theta;

      if (leave_row < 0) {
        // Bound flip: the entering variable crosses to its other bound.
        status_[ue] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        val_[ue] = dir > 0 ? hi_[ue] : lo_[ue];
        continue;
      }
      const auto ur = static_cast<std::size_t>(leave_row);
      const auto leaving = static_cast<std::size_t>(basis_[ur]);
      status_[leaving] = leave_to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
      val_[leaving] = leave_to_upper ? hi_[leaving] : lo_[leaving];
      pivot(leave_row, enter);
      ++pivots;
    }
    throw NumericalError("simplex iteration limit reached");
  }

  void pivot(int r, int c) {
    const auto ur = static_cast<std::size_t>(r);
    const auto uc = static_cast<std::size_t>(c);
    auto& prow = tab_[ur];
    const double pv = prow[uc];
    for (double& v : prow) v /= pv;
    prow[uc] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      auto& row = tab_[static_cast<std::size_t>(i)];
      const double f = row[uc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (prow[j] != 0.0) row[j] -= f * prow[j];
      }
      row[uc] = 0.0;
    }
    basis_[ur] = c;
    status_[uc] = VarStatus::kBasic;
  }

  int m_;
  int n_;
  std::vector<std::vector<double>> tab_;
  std::vector<int> basis_;
  std::vector<double> lo_, hi_, val_, cost_;
  std::vector<VarStatus> status_;
  bool has_artificial_ = false;
};

bool is_integral(const Problem& p, const std::vector<double>& x) {
  for (int j = 0; j < p.num_vars(); ++j) {
    if (!p.integer[static_cast<std::size_t>(j)]) continue;
    const double v = x[static_cast<std::size_t>(j)];
    if (std::abs(v - std::round(v)) > kTol) return false;
  }
  return true;
}

std::vector<double> rounded(const Problem& p, std::vector<double> x) {
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.integer[static_cast<std::size_t>(j)]) x[static_cast<std::size_t>(j)] = std::round(x[static_cast<std::size_t>(j)]);
  }
  return x;
}

struct Node {
  double bound;
  long long id;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> x;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

}  // namespace

int Problem::add_var(double obj, double lo, double hi, bool is_integer) {
  objective.push_back(obj);
  lower.push_back(lo);
  upper.push_back(hi);
  integer.push_back(is_integer);
  return num_vars() - 1;
}

LpResult solve_lp(const Problem& problem, const std::vector<double>& lower, const std::vector<double>& upper) {
  for (int j = 0; j < problem.num_vars(); ++j) {
    if (lower[static_cast<std::size_t>(j)] > upper[static_cast<std::size_t>(j)] + kTol) {
      return {LpStatus::kInfeasible, 0.0, {}, 0};
    }
  }
  Simplex simplex(problem, lower, upper);
  return simplex.run(problem);
}

LpResult solve_lp(const Problem& problem) { return solve_lp(problem, problem.lower, problem.upper); }

double evaluate(const Problem& problem, const std::vector<double>& x) {
  double v = problem.constant;
  for (int j = 0; j < problem.num_vars(); ++j) v += problem.objective[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return v;
}

double max_violation(const Problem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < problem.num_vars(); ++j) {
    const auto uj = static_cast<std::size_t>(j);
    worst = std::max({worst, problem.lower[uj] - x[uj], x[uj] - problem.upper[uj]});
  }
  for (const auto& row : problem.rows) {
    double a = 0.0;
    for (const auto& [j, c] : row.coefs) a += c * x[static_cast<std::size_t>(j)];
    switch (row.sense) {
      case Sense::kLe: worst = std::max(worst, a - row.rhs); break;
      case Sense::kGe: worst = std::max(worst, row.rhs - a); break;
      case Sense::kEq: worst = std::max(worst, std::abs(a - row.rhs)); break;
    }
  }
  return worst;
}

MilpResult solve_milp(const Problem& problem, const MilpOptions& options) {
  MilpResult out;
  bool have_incumbent = false;
  double incumbent = -kInf;
  if (options.warm_start) {
    const auto& w = *options.warm_start;
    if (static_cast<int>(w.size()) == problem.num_vars() && is_integral(problem, w) && max_violation(problem, w) <= kTol) {
      have_incumbent = true;
      incumbent = evaluate(problem, w);
      out.x = w;
    }
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long long next_id = 0;
  auto push_solved = [&](std::vector<double> lo, std::vector<double> hi) {
    ++out.nodes;
    auto lp = solve_lp(problem, lo, hi);
    if (lp.status == LpStatus::kUnbounded) throw Error("MILP relaxation is unbounded");
    if (lp.status != LpStatus::kOptimal) return false;
    open.push({lp.value, next_id++, std::move(lo), std::move(hi), std::move(lp.x)});
    return true;
  };

  if (!push_solved(problem.lower, problem.upper)) throw Infeasible("MILP relaxation is infeasible");

  bool budget_hit = false;
  while (!open.empty()) {
    if (have_incumbent && open.top().bound <= incumbent + kTol) break;
    if (out.nodes >= options.node_budget) {
      budget_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (is_integral(problem, node.x)) {
      auto x = rounded(problem, node.x);
      if (max_violation(problem, x) <= 1e-7) {
        const double v = evaluate(problem, x);
        if (!have_incumbent || v > incumbent + kTol) {
          incumbent = v;
          out.x = std::move(x);
          have_incumbent = true;
        }
      }
      continue;
    }
    int branch = -1;
    double best_frac = -1.0;
    for (int j = 0; j < problem.num_vars(); ++j) {
      if (!problem.integer[static_cast<std::size_t>(j)]) continue;
      const double v = node.x[static_cast<std::size_t>(j)];
      const double f = v - std::floor(v);
      const double dist = std::min(f, 1.0 - f);
      if (dist > kTol && dist > best_frac + kTol) {
        best_frac = dist;
        branch = j;
      }
    }
    const auto ub = static_cast<std::size_t>(branch);
    auto down_hi = node.upper;
    down_hi[ub] = std::floor(node.x[ub]);
    auto up_lo = node.lower;
    up_lo[ub] = std::ceil(node.x[ub]);
    push_solved(node.lower, std::move(down_hi));
    push_solved(std::move(up_lo), node.upper);
  }

  if (!have_incumbent) {
    if (budget_hit) throw BudgetExceeded("MILP node budget exhausted before an integral solution was found");
    throw Infeasible("MILP has no integral solution");
  }
  out.value = incumbent;
  out.exact = !budget_hit;
  out.bound = incumbent;
  if (budget_hit) {
    while (!open.empty()) {
      out.bound = std::max(out.bound, open.top().bound);
      open.pop();
    }
  }
  return out;
}

}  // namespace hindsight::milp
