#pragma once

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/core/rng.hpp"

namespace hindsight {

/// Non-anticipatory policy over decision states. `reset` is called at the
/// start of every episode so policies may hold per-episode state
/// (round-robin cursor, running histograms).
template <class State>
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset() {}
  /// `feasible` is env.actions(s) and is never empty.
  virtual Action act(const State& s, int t, std::span<const Action> feasible, CounterRng& rng) = 0;
  /// True when act() never consumes randomness.
  virtual bool deterministic() const { return true; }
};

template <class State>
using PolicyPtr = std::shared_ptr<Policy<State>>;

/// Wraps a callable (state, t, feasible, rng) -> action.
template <class State>
class LambdaPolicy final : public Policy<State> {
 public:
  using Fn = std::function<Action(const State&, int, std::span<const Action>, CounterRng&)>;
  explicit LambdaPolicy(Fn fn, bool deterministic = true) : fn_(std::move(fn)), deterministic_(deterministic) {}

  Action act(const State& s, int t, std::span<const Action> feasible, CounterRng& rng) override {
    return fn_(s, t, feasible, rng);
  }
  bool deterministic() const override { return deterministic_; }

 private:
  Fn fn_;
  bool deterministic_;
};

template <class State, class Fn>
PolicyPtr<State> make_policy(Fn fn, bool deterministic = true) {
  return std::make_shared<LambdaPolicy<State>>(typename LambdaPolicy<State>::Fn(std::move(fn)), deterministic);
}

/// Plays a fixed action sequence a_1..a_T (open-loop control).
template <class State>
class OpenLoopPolicy final : public Policy<State> {
 public:
  explicit OpenLoopPolicy(std::vector<Action> actions) : actions_(std::move(actions)) {}
  Action act(const State&, int t, std::span<const Action>, CounterRng&) override {
    return actions_.at(static_cast<std::size_t>(t - 1));
  }

 private:
  std::vector<Action> actions_;
};

/// Uniformly random feasible action.
template <class State>
class UniformPolicy final : public Policy<State> {
 public:
  Action act(const State&, int, std::span<const Action> feasible, CounterRng& rng) override {
    return feasible[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(feasible.size()) - 1))];
  }
  bool deterministic() const override { return false; }
};

}  // namespace hindsight
