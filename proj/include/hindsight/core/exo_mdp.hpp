#pragma once

// Exo-MDP abstraction: the only randomness is an exogenous trace
// xi_1..xi_T; given the trace, dynamics and rewards are deterministic.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hindsight/core/errors.hpp"

namespace hindsight {

using Action = int;

/// Designated "no placement" action used by environments whose action set
/// would otherwise be empty (VM env with no fitting PM or no request).
inline constexpr Action kFailAction = -1;

template <class State>
struct Transition {
  State next;
  double reward = 0.0;
};

/// Declared per-step reward range; used for diagnostics only.
struct RewardRange {
  double lo = 0.0;
  double hi = 1.0;
};

/// Immutable exogenous trace. Time is 1-based in the API (input(t) for
/// t in [1, T]); storage and files are 0-based.
template <class Input>
class ExoTrace {
 public:
  ExoTrace() = default;
  explicit ExoTrace(std::vector<Input> inputs) : inputs_(std::move(inputs)) {}

  int length() const { return static_cast<int>(inputs_.size()); }
  bool empty() const { return inputs_.empty(); }
  const Input& input(int t) const { return inputs_.at(static_cast<std::size_t>(t - 1)); }

  /// View of xi_t..xi_T.
  std::span<const Input> suffix(int t) const {
    const auto start = static_cast<std::size_t>(std::clamp(t - 1, 0, length()));
    return std::span<const Input>(inputs_).subspan(start);
  }
  std::span<const Input> inputs() const { return inputs_; }

  friend bool operator==(const ExoTrace&, const ExoTrace&) = default;

 private:
  std::vector<Input> inputs_;
};

/// Interface every environment satisfies.
///   observe(s, xi_t): reveals what the decision maker sees before acting at t
///     (identity when inputs are only seen after acting).
///   step(s, a, xi_t): the known transition f and reward r.
template <class E>
concept ExoEnv = requires(const E& env, const typename E::State& s, const typename E::Input& xi, Action a) {
  typename E::State;
  typename E::Input;
  { E::kRevealsCurrentInput } -> std::convertible_to<bool>;
  { env.horizon() } -> std::convertible_to<int>;
  { env.initial_state() } -> std::same_as<typename E::State>;
  { env.observe(s, xi) } -> std::same_as<typename E::State>;
  { env.actions(s) } -> std::same_as<std::vector<Action>>;
  { env.step(s, a, xi) } -> std::same_as<Transition<typename E::State>>;
  { env.reward_range() } -> std::same_as<RewardRange>;
};

/// Environments with action-dependent features phi(s, a).
template <class E>
concept FeaturedEnv = ExoEnv<E> && requires(const E& env, const typename E::State& s, Action a, int t) {
  { env.feature_dim() } -> std::convertible_to<int>;
  { env.features(s, a, t) } -> std::same_as<std::vector<double>>;
};

/// Environments whose states can be enumerated / memoised by key.
template <class E>
concept KeyedEnv = ExoEnv<E> && requires(const E& env, const typename E::State& s) {
  { env.state_key(s) } -> std::same_as<std::string>;
};

template <ExoEnv E>
using StateOf = typename E::State;
template <ExoEnv E>
using InputOf = typename E::Input;

/// Decision state at time t+1 after the transition at t; `rest` holds
/// xi_{t+1}..xi_T.
template <ExoEnv E>
StateOf<E> next_decision_state(const E& env, StateOf<E> next, std::span<const InputOf<E>> rest) {
  if (rest.empty()) return next;
  return env.observe(next, rest.front());
}

template <ExoEnv E>
bool is_feasible(const E& env, const StateOf<E>& s, Action a) {
  const auto acts = env.actions(s);
  return std::find(acts.begin(), acts.end(), a) != acts.end();
}

}  // namespace hindsight
