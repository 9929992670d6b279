#pragma once

#include <span>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/envs/tabular.hpp"

namespace hindsight::learn {

/// Tabular plan computed against a forecast input distribution.
struct ForecastPolicy {
  std::vector<std::vector<std::vector<double>>> q;  // q[t-1][x][a]
  std::vector<std::vector<double>> v;               // v[t-1][x], plus v[T] = 0
  Action act(int t, int x) const;
};

/// Pooled empirical marginal of the inputs over every (trace, time).
std::vector<double> empirical_marginal(std::span<const ExoTrace<int>> data, int n_inputs);

/// Backward induction treating inputs as iid with marginal `p`.
ForecastPolicy plan_with_marginal(const envs::TabularEnv& env, const std::vector<double>& p);

/// The forecast-then-plan baseline: estimate the marginal, then plan.
ForecastPolicy forecast_plan(const envs::TabularEnv& env, std::span<const ExoTrace<int>> data);

/// Exact value of a (t, x) -> action table under iid inputs with marginal p.
double markov_policy_value(const envs::TabularEnv& env, const std::vector<double>& p,
                           const std::vector<std::vector<Action>>& table);

/// Table form of a forecast policy.
std::vector<std::vector<Action>> policy_table(const envs::TabularEnv& env, const ForecastPolicy& pi);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace hindsight::learn
