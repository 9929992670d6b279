#pragma once

#include <algorithm>
#include <span>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/planners/plan.hpp"

namespace hindsight {

namespace detail {

template <ExoEnv E>
struct ExhaustiveSearch {
  const E& env;
  long long budget;
  long long nodes = 0;
  double best = 0.0;
  bool found = false;
  std::vector<Action> path{};
  std::vector<Action> best_path{};

  void run(const StateOf<E>& pre, std::span<const InputOf<E>> suffix, double acc) {
    if (++nodes > budget) throw BudgetExceeded("exhaustive hindsight search exceeded its node budget");
    if (suffix.empty()) {
      // Strict improvement keeps the lexicographically smallest optimum.
      if (!found || acc > best + 1e-12) {
        best = acc;
        best_path = path;
        found = true;
      }
      return;
    }
    const auto s = env.observe(pre, suffix.front());
    auto acts = env.actions(s);
    std::sort(acts.begin(), acts.end());
    for (Action a : acts) {
      auto tr = env.step(s, a, suffix.front());
      path.push_back(a);
      run(tr.next, suffix.subspan(1), acc + tr.reward);
      path.pop_back();
    }
  }
};

}  // namespace detail

/// Reference oracle: max over every feasible action sequence for the suffix.
/// Ties resolve to the lexicographically smallest sequence.
template <ExoEnv E>
HindsightPlan hindsight_exhaustive(const E& env, int t, const StateOf<E>& pre, std::span<const InputOf<E>> suffix,
                                   long long node_budget = 5'000'000) {
  (void)t;
  detail::ExhaustiveSearch<E> search{env, node_budget};
  search.run(pre, suffix, 0.0);
  return {search.best, search.best_path, true, search.nodes, search.best};
}

/// Functor form of hindsight_exhaustive.
struct ExhaustivePlanner {
  long long node_budget = 5'000'000;

  template <ExoEnv E>
  HindsightPlan operator()(const E& env, int t, const StateOf<E>& pre, std::span<const InputOf<E>> suffix) const {
    return hindsight_exhaustive(env, t, pre, suffix, node_budget);
  }
};

/// Replays an action sequence from `pre` over the suffix and returns its return.
template <ExoEnv E>
double replay_actions(const E& env, const StateOf<E>& pre, std::span<const InputOf<E>> suffix,
                      std::span<const Action> actions) {
  if (actions.size() != suffix.size()) throw Error("plan length does not match suffix length");
  auto state = pre;
  double total = 0.0;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    const auto s = env.observe(state, suffix[i]);
    if (!is_feasible(env, s, actions[i])) throw InvalidAction("plan action infeasible during replay");
    auto tr = env.step(s, actions[i], suffix[i]);
    total += tr.reward;
    state = std::move(tr.next);
  }
  return total;
}

}  // namespace hindsight
