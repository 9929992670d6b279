#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/core/policy.hpp"
#include "hindsight/core/rng.hpp"
#include "hindsight/core/stats.hpp"

namespace hindsight {

template <class State, class Input>
struct TrajectoryStep {
  int t = 0;
  State state;  // decision state s_t
  Action action = 0;
  Input input{};
  double reward = 0.0;
  State next;  // f(s_t, a_t, xi_t), before observing xi_{t+1}
};

template <class State, class Input>
struct Trajectory {
  std::vector<TrajectoryStep<State, Input>> steps;
  double total_return = 0.0;
};

template <ExoEnv E>
using TrajectoryOf = Trajectory<StateOf<E>, InputOf<E>>;

namespace detail {
template <ExoEnv E>
void check_trace_length(const E& env, int length) {
  if (length != env.horizon()) {
    throw Error("trace length " + std::to_string(length) + " does not match horizon " +
                std::to_string(env.horizon()));
  }
}
}  // namespace detail

/// Plays `policy` over `trace`. Actions outside A(s) raise InvalidAction.
template <ExoEnv E>
TrajectoryOf<E> rollout(const E& env, Policy<StateOf<E>>& policy, const ExoTrace<InputOf<E>>& trace,
                        std::uint64_t seed) {
  detail::check_trace_length(env, trace.length());
  CounterRng rng(seed);
  policy.reset();
  TrajectoryOf<E> traj;
  traj.steps.reserve(static_cast<std::size_t>(trace.length()));
  StateOf<E> s = env.initial_state();
  for (int t = 1; t <= trace.length(); ++t) {
    const auto& xi = trace.input(t);
    s = env.observe(s, xi);
    const auto feasible = env.actions(s);
    if (feasible.empty()) throw NoFeasibleAction("environment returned an empty action set");
    const Action a = policy.act(s, t, feasible, rng);
    if (std::find(feasible.begin(), feasible.end(), a) == feasible.end()) {
      throw InvalidAction("action " + std::to_string(a) + " not in A(s) at t=" + std::to_string(t));
    }
    auto tr = env.step(s, a, xi);
    traj.total_return += tr.reward;
    traj.steps.push_back({t, s, a, xi, tr.reward, tr.next});
    s = std::move(tr.next);
  }
  return traj;
}

namespace detail {
template <ExoEnv E>
double value_from(const E& env, Policy<StateOf<E>>& policy, const StateOf<E>& pre_state, int t,
                  std::span<const InputOf<E>> suffix, CounterRng& rng) {
  if (suffix.empty()) return 0.0;
  const auto s = env.observe(pre_state, suffix.front());
  const auto feasible = env.actions(s);
  if (feasible.empty()) throw NoFeasibleAction("environment returned an empty action set");
  const Action a = policy.act(s, t, feasible, rng);
  if (std::find(feasible.begin(), feasible.end(), a) == feasible.end()) {
    throw InvalidAction("action " + std::to_string(a) + " not in A(s) at t=" + std::to_string(t));
  }
  const auto tr = env.step(s, a, suffix.front());
  return tr.reward + value_from(env, policy, tr.next, t + 1, suffix.subspan(1), rng);
}
}  // namespace detail

/// V_1^pi(s_1, xi) by the recursion V_t = r(s_t, pi(s_t), xi_t) + V_{t+1}.
/// Deterministic policies only; a second route to rollout().total_return.
template <ExoEnv E>
double exact_value(const E& env, Policy<StateOf<E>>& policy, const ExoTrace<InputOf<E>>& trace) {
  if (!policy.deterministic()) throw Error("exact_value requires a deterministic policy");
  detail::check_trace_length(env, trace.length());
  policy.reset();
  CounterRng unused(0);
  return detail::value_from(env, policy, env.initial_state(), 1, trace.inputs(), unused);
}

/// Sample mean and standard error of per-trace returns. Trace i is played
/// with seed derive_seed(seed, i).
template <ExoEnv E>
MeanStderr mc_value(const E& env, Policy<StateOf<E>>& policy, std::span<const ExoTrace<InputOf<E>>> traces,
                    std::uint64_t seed) {
  if (traces.empty()) throw EmptyDataset("mc_value needs at least one trace");
  std::vector<double> returns;
  returns.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    returns.push_back(rollout(env, policy, traces[i], derive_seed(seed, i)).total_return);
  }
  return mean_and_stderr(returns);
}

}  // namespace hindsight
