#pragma once

#include <concepts>
#include <limits>
#include <span>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"

namespace hindsight {

/// Result of a hindsight planner for a fixed trace suffix.
/// `bound` is a proven upper bound on the optimum (equal to value when exact).
struct HindsightPlan {
  double value = 0.0;
  std::vector<Action> actions;
  bool exact = true;
  long long nodes = 0;
  double bound = 0.0;
};

/// Planners take the state *before* observing xi_t (as produced by
/// env.initial_state() or step().next) together with xi_t..xi_T.
template <class P, class E>
concept HindsightPlanner =
    ExoEnv<E> && requires(P& p, const E& env, int t, const StateOf<E>& s, std::span<const InputOf<E>> suffix) {
      { p(env, t, s, suffix) } -> std::same_as<HindsightPlan>;
    };

}  // namespace hindsight
