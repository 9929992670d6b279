#include "hindsight/envs/tabular.hpp"

#include <cmath>

namespace hindsight::envs {

TabularEnv::TabularEnv(int n_states, int n_actions, int n_inputs, Table reward, NextTable next, int x0)
    : n_states_(n_states),
      n_actions_(n_actions),
      n_inputs_(n_inputs),
      reward_(std::move(reward)),
      next_(std::move(next)),
      x0_(x0) {
  if (n_states < 1 || n_actions < 1 || n_inputs < 1) throw ConfigError("tabular sizes must be positive");
  if (reward_.size() != next_.size()) throw ConfigError("reward and transition tables differ in horizon");
  for (std::size_t t = 0; t < reward_.size(); ++t) {
    if (static_cast<int>(reward_[t].size()) != n_states || static_cast<int>(next_[t].size()) != n_states) {
      throw ConfigError("tabular table has wrong state dimension");
    }
    for (int x = 0; x < n_states; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      if (static_cast<int>(reward_[t][ux].size()) != n_actions || static_cast<int>(next_[t][ux].size()) != n_actions) {
        throw ConfigError("tabular table has wrong action dimension");
      }
      for (int a = 0; a < n_actions; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        if (static_cast<int>(reward_[t][ux][ua].size()) != n_inputs ||
            static_cast<int>(next_[t][ux][ua].size()) != n_inputs) {
          throw ConfigError("tabular table has wrong input dimension");
        }
        for (int y : next_[t][ux][ua]) {
          if (y < 0 || y >= n_states) throw ConfigError("tabular transition leaves the state space");
        }
      }
    }
  }
  if (x0 < 0 || x0 >= n_states) throw ConfigError("tabular initial state out of range");
}

std::vector<Action> TabularEnv::actions(const State&) const {
  std::vector<Action> acts(static_cast<std::size_t>(n_actions_));
  for (int a = 0; a < n_actions_; ++a) acts[static_cast<std::size_t>(a)] = a;
  return acts;
}

double TabularEnv::reward(int t, int x, Action a, int xi) const {
  return reward_.at(static_cast<std::size_t>(t - 1))
      .at(static_cast<std::size_t>(x))
      .at(static_cast<std::size_t>(a))
      .at(static_cast<std::size_t>(xi));
}

int TabularEnv::next(int t, int x, Action a, int xi) const {
  return next_.at(static_cast<std::size_t>(t - 1))
      .at(static_cast<std::size_t>(x))
      .at(static_cast<std::size_t>(a))
      .at(static_cast<std::size_t>(xi));
}

Transition<TabularState> TabularEnv::step(const State& s, Action a, const Input& xi) const {
  if (a < 0 || a >= n_actions_) throw InvalidAction("tabular action out of range");
  const int t = static_cast<int>(s.prefix.size()) + 1;
  State out{next(t, s.x, a, xi), s.prefix};
  out.prefix.push_back(xi);
  return {std::move(out), reward(t, s.x, a, xi)};
}

std::string TabularEnv::state_key(const State& s) const {
  std::string key = std::to_string(s.x) + "|";
  for (int v : s.prefix) key += std::to_string(v) + ",";
  return key;
}

std::vector<double> TabularEnv::features(const State& s, Action a, int t) const {
  std::vector<double> phi(static_cast<std::size_t>(feature_dim()), 0.0);
  if (t >= 1 && t <= horizon()) phi[static_cast<std::size_t>(t - 1)] = 1.0;
  phi[static_cast<std::size_t>(horizon() + s.x)] = 1.0;
  phi[static_cast<std::size_t>(horizon() + n_states_ + a)] = 1.0;
  return phi;
}

TabularEnv random_tabular_env(CounterRng& rng, int n_states, int n_actions, int n_inputs, int horizon) {
  TabularEnv::Table reward(static_cast<std::size_t>(horizon));
  TabularEnv::NextTable next(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    auto& rt = reward[static_cast<std::size_t>(t)];
    auto& nt = next[static_cast<std::size_t>(t)];
    rt.assign(static_cast<std::size_t>(n_states), {});
    nt.assign(static_cast<std::size_t>(n_states), {});
    for (int x = 0; x < n_states; ++x) {
      rt[static_cast<std::size_t>(x)].assign(static_cast<std::size_t>(n_actions), {});
      nt[static_cast<std::size_t>(x)].assign(static_cast<std::size_t>(n_actions), {});
      for (int a = 0; a < n_actions; ++a) {
        for (int xi = 0; xi < n_inputs; ++xi) {
          rt[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)].push_back(rng.uniform());
          nt[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)].push_back(
              static_cast<int>(rng.uniform_int(0, n_states - 1)));
        }
      }
    }
  }
  return TabularEnv(n_states, n_actions, n_inputs, std::move(reward), std::move(next), 0);
}

namespace {

template <class Weight>
TraceDistribution<int> enumerate_traces(int n_inputs, int horizon, Weight weight) {
  TraceDistribution<int> out;
  std::vector<int> seq(static_cast<std::size_t>(horizon), 0);
  while (true) {
    out.emplace_back(ExoTrace<int>(seq), weight(seq));
    int k = horizon - 1;
    while (k >= 0 && seq[static_cast<std::size_t>(k)] == n_inputs - 1) seq[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
    ++seq[static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace

TraceDistribution<int> iid_trace_distribution(const std::vector<double>& p, int horizon) {
  if (p.empty()) throw ConfigError("iid marginal must be nonempty");
  auto dist = enumerate_traces(static_cast<int>(p.size()), horizon, [&](const std::vector<int>& seq) {
    double w = 1.0;
    for (int v : seq) w *= p[static_cast<std::size_t>(v)];
    return w;
  });
  std::erase_if(dist, [](const auto& e) { return e.second <= 0.0; });
  return dist;
}

TraceDistribution<int> random_trace_distribution(CounterRng& rng, int n_inputs, int horizon) {
  auto dist = enumerate_traces(n_inputs, horizon, [&](const std::vector<int>&) { return rng.uniform() + 1e-3; });
  double total = 0.0;
  for (const auto& e : dist) total += e.second;
  for (auto& e : dist) e.second /= total;
  return dist;
}

}  // namespace hindsight::envs
