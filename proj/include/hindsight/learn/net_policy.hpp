#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/core/policy.hpp"
#include "hindsight/core/rng.hpp"
#include "hindsight/neural/mlp.hpp"
#include "hindsight/surrogate/surrogate.hpp"

namespace hindsight::learn {

/// phi(s, a) at time t with a fixed dimension.
template <class State>
struct Featurizer {
  int dim = 0;
  std::function<std::vector<double>(const State&, Action, int)> fn;

  std::vector<double> operator()(const State& s, Action a, int t) const { return fn(s, a, t); }
  std::vector<std::vector<double>> all(const State& s, std::span<const Action> actions, int t) const {
    std::vector<std::vector<double>> out;
    out.reserve(actions.size());
    for (Action a : actions) out.push_back(fn(s, a, t));
    return out;
  }
};

/// The environment's own action-dependent features.
template <FeaturedEnv E>
Featurizer<StateOf<E>> env_features(const E& env) {
  return {env.feature_dim(), [&env](const StateOf<E>& s, Action a, int t) { return env.features(s, a, t); }};
}

/// One-hot over (t, state, action) triples, indexed in order of first
/// appearance. With a network without hidden layers this is an exact table.
/// Throws StateSpaceTooLarge once `capacity` distinct triples are seen.
template <KeyedEnv E>
Featurizer<StateOf<E>> one_hot_features(const E& env, int capacity) {
  struct Index {
    std::mutex mu;
    std::unordered_map<std::string, int> ids;
  };
  auto index = std::make_shared<Index>();
  return {capacity, [&env, index, capacity](const StateOf<E>& s, Action a, int t) {
            const std::string key = std::to_string(t) + '|' + std::to_string(a) + '|' + env.state_key(s);
            int id = 0;
            {
              std::lock_guard lock(index->mu);
              auto it = index->ids.find(key);
              if (it == index->ids.end()) {
                if (static_cast<int>(index->ids.size()) >= capacity) {
                  throw StateSpaceTooLarge("one-hot feature table is full");
                }
                it = index->ids.emplace(key, static_cast<int>(index->ids.size())).first;
              }
              id = it->second;
            }
            std::vector<double> x(static_cast<std::size_t>(capacity), 0.0);
            x[static_cast<std::size_t>(id)] = 1.0;
            return x;
          }};
}

/// Scores every feasible action with the network.
///   kGreedy   argmax score, lowest action on ties
///   kSoftmax  sample from softmax(scores)
///   kEpsilon  uniform with probability epsilon, greedy otherwise
template <class State>
class NetPolicy final : public Policy<State> {
 public:
  enum class Mode { kGreedy, kSoftmax, kEpsilon };

  NetPolicy(Featurizer<State> phi, neural::Mlp net, Mode mode = Mode::kGreedy, double epsilon = 0.0)
      : phi_(std::move(phi)), net_(std::move(net)), mode_(mode), epsilon_(epsilon) {}

  Action act(const State& s, int t, std::span<const Action> feasible, CounterRng& rng) override {
    if (mode_ == Mode::kEpsilon && rng.bernoulli(epsilon_)) {
      return feasible[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(feasible.size()) - 1))];
    }
    std::vector<double> scores;
    scores.reserve(feasible.size());
    for (Action a : feasible) scores.push_back(net_.forward(phi_(s, a, t)));
    if (mode_ == Mode::kSoftmax) {
      const auto p = neural::softmax(scores);
      return feasible[rng.categorical(p)];
    }
    return feasible[surrogate::argmax_lowest(feasible, scores)];
  }

  bool deterministic() const override { return mode_ == Mode::kGreedy; }

  const neural::Mlp& net() const { return net_; }
  neural::Mlp& net() { return net_; }
  void set_epsilon(double e) { epsilon_ = e; }

 private:
  Featurizer<State> phi_;
  neural::Mlp net_;
  Mode mode_;
  double epsilon_;
};

/// Runs fn(i) for i in [0, n) on `workers` threads. Each index writes only
/// its own output slot, so results do not depend on the worker count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex err_mu;
  std::exception_ptr err;
  const auto w = static_cast<std::size_t>(workers);
  for (std::size_t k = 0; k < w && k < n; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += w) fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace hindsight::learn
