#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/core/rng.hpp"

namespace hindsight::envs {

/// s_t = (x_t, xi_<t): the endogenous index plus the observed prefix, so
/// policies over this state may condition on history.
struct TabularState {
  int x = 0;
  std::vector<int> prefix;

  friend bool operator==(const TabularState&, const TabularState&) = default;
};

/// Finite Exo-MDP with explicit tables indexed [t-1][x][a][xi]. Inputs are
/// symbols 0..n_inputs-1 seen only after acting.
class TabularEnv {
 public:
  using State = TabularState;
  using Input = int;
  static constexpr bool kRevealsCurrentInput = false;

  using Table = std::vector<std::vector<std::vector<std::vector<double>>>>;
  using NextTable = std::vector<std::vector<std::vector<std::vector<int>>>>;

  TabularEnv(int n_states, int n_actions, int n_inputs, Table reward, NextTable next, int x0 = 0);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_inputs() const { return n_inputs_; }
  int horizon() const { return static_cast<int>(reward_.size()); }

  State initial_state() const { return {x0_, {}}; }
  State observe(const State& s, const Input&) const { return s; }
  std::vector<Action> actions(const State&) const;
  Transition<State> step(const State& s, Action a, const Input& xi) const;
  RewardRange reward_range() const { return {0.0, 1.0}; }
  std::string state_key(const State& s) const;

  int feature_dim() const { return horizon() + n_states_ + n_actions_; }
  /// one-hot(t), one-hot(x), one-hot(a).
  std::vector<double> features(const State& s, Action a, int t) const;

  double reward(int t, int x, Action a, int xi) const;
  int next(int t, int x, Action a, int xi) const;

 private:
  int n_states_;
  int n_actions_;
  int n_inputs_;
  Table reward_;
  NextTable next_;
  int x0_;
};

/// Random instance: rewards uniform in [0, 1], transitions uniform over states.
TabularEnv random_tabular_env(CounterRng& rng, int n_states, int n_actions, int n_inputs, int horizon);

/// Weighted support of a trace distribution (probabilities sum to 1).
template <class Input>
using TraceDistribution = std::vector<std::pair<ExoTrace<Input>, double>>;

/// Every sequence in {0..n_inputs-1}^T with iid marginal `p`.
TraceDistribution<int> iid_trace_distribution(const std::vector<double>& p, int horizon);

/// Every sequence in {0..n_inputs-1}^T with random (correlated) weights.
TraceDistribution<int> random_trace_distribution(CounterRng& rng, int n_inputs, int horizon);

/// Uniform distribution over a dataset (the empirical MDP); duplicates merge.
template <class Input>
TraceDistribution<Input> uniform_over(const std::vector<ExoTrace<Input>>& data) {
  if (data.empty()) throw EmptyDataset("empirical distribution needs at least one trace");
  TraceDistribution<Input> out;
  const double w = 1.0 / static_cast<double>(data.size());
  for (const auto& tr : data) {
    bool merged = false;
    for (auto& [seen, p] : out) {
      if (seen == tr) {
        p += w;
        merged = true;
        break;
      }
    }
    if (!merged) out.emplace_back(tr, w);
  }
  return out;
}

/// Samples one trace from a weighted support.
template <class Input>
const ExoTrace<Input>& sample_from(const TraceDistribution<Input>& dist, CounterRng& rng) {
  std::vector<double> w;
  w.reserve(dist.size());
  for (const auto& e : dist) w.push_back(e.second);
  return dist[rng.categorical(w)].first;
}

}  // namespace hindsight::envs
