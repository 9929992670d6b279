#pragma once

// Hindsight Learning (oracle-labelled policy distillation) and the
// simulator-trained baselines. Every trainer is driven by rollouts on
// dataset traces and returns the best iterate by mean validation return.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/core/policy.hpp"
#include "hindsight/core/rng.hpp"
#include "hindsight/core/rollout.hpp"
#include "hindsight/learn/buffer.hpp"
#include "hindsight/learn/net_policy.hpp"
#include "hindsight/learn/objectives.hpp"
#include "hindsight/neural/mlp.hpp"
#include "hindsight/surrogate/surrogate.hpp"

namespace hindsight::learn {

struct TrainConfig {
  int iterations = 20;              // K
  int rollouts_per_iteration = 1;
  int workers = 1;                  // labelling threads
  int grad_steps = 50;              // per iteration
  int batch_size = 32;
  double lr = 5e-3;
  double gamma = 0.99;              // baselines only
  double entropy_coef = 0.0;
  double actor_coef = 1.0;
  double tau = 0.05;                // target-network smoothing
  std::size_t buffer_capacity = 50'000;
  int label_cap = 0;                // max oracle-labelled states per iteration (0 = all)
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double rms_decay = 0.99;
  double rms_eps = 1e-8;
  std::vector<int> hidden{32, 16, 8};
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations < 0 || rollouts_per_iteration < 1 || workers < 1 || grad_steps < 0 || batch_size < 1) {
      throw ConfigError("training counts must be positive");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
    if (lr < 0.0 || tau < 0.0 || tau > 1.0) throw ConfigError("bad learning rate or tau");
  }
};

struct CurvePoint {
  int iteration = 0;
  double loss = 0.0;
  double train_return = 0.0;
  double val_return = 0.0;
};

struct TrainResult {
  neural::Mlp net;
  std::vector<CurvePoint> curve;
  int best_iteration = 0;
  double best_val_return = -std::numeric_limits<double>::infinity();
  long long labels = 0;
  long long inexact_labels = 0;
};

enum class HlLoss { kMac, kQDistill };

/// Mean greedy return of a network policy over traces.
template <ExoEnv E>
double mean_return(const E& env, Policy<StateOf<E>>& policy, std::span<const ExoTrace<InputOf<E>>> traces,
                   std::uint64_t seed) {
  return mc_value(env, policy, traces, seed).mean;
}

namespace detail {

inline neural::RmsProp make_optimizer(const TrainConfig& cfg) {
  neural::RmsProp opt;
  opt.lr = cfg.lr;
  opt.decay = cfg.rms_decay;
  opt.eps = cfg.rms_eps;
  return opt;
}

inline void ascend(neural::RmsProp& opt, neural::Mlp& net, std::vector<double> grad, double scale = 1.0) {
  for (auto& g : grad) g *= -scale;
  opt.step(net.params(), grad);
}

inline void soft_update(neural::Mlp& target, const neural::Mlp& online, double tau) {
  auto& tp = target.params();
  const auto& op = online.params();
  for (std::size_t i = 0; i < tp.size(); ++i) tp[i] = tau * op[i] + (1.0 - tau) * tp[i];
}

/// Tracks the best iterate by validation return (earliest wins ties).
template <ExoEnv E>
struct Selector {
  const E& env;
  const Featurizer<StateOf<E>>& phi;
  std::span<const ExoTrace<InputOf<E>>> val;
  std::uint64_t seed;
  TrainResult& result;

  double score(const neural::Mlp& net) const {
    NetPolicy<StateOf<E>> greedy(phi, net);
    return mean_return(env, greedy, val, seed);
  }
  double offer(const neural::Mlp& net, int iteration) {
    const double v = score(net);
    if (v > result.best_val_return) {
      result.best_val_return = v;
      result.best_iteration = iteration;
      result.net = net;
    }
    return v;
  }
};

template <class T>
std::span<const T> validation_or(std::span<const T> val, std::span<const T> train) {
  return val.empty() ? train : val;
}

inline double epsilon_at(const TrainConfig& cfg, int k) {
  const double half = std::max(1.0, cfg.iterations / 2.0);
  const double frac = std::min(1.0, (k - 1) / half);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

}  // namespace detail

/// Oracle-labelled training loop. Each iteration samples traces, rolls the
/// current policy out on them, labels every visited state for all feasible
/// actions with r + Hindsight(t+1, ...) on the same trace, aggregates the
/// labels, and takes gradient steps on the chosen loss.
template <ExoEnv E, class Planner>
TrainResult hindsight_learning_train(const E& env, const Planner& planner, const Featurizer<StateOf<E>>& phi,
                                     std::span<const ExoTrace<InputOf<E>>> train,
                                     std::span<const ExoTrace<InputOf<E>>> val, const TrainConfig& cfg, HlLoss loss) {
  using State = StateOf<E>;
  cfg.validate();
  if (train.empty()) throw EmptyDataset("training set is empty");
  const auto vset = detail::validation_or(val, train);
  TrainResult result;
  neural::Mlp net = neural::Mlp::glorot(phi.dim, cfg.hidden, derive_seed(cfg.seed, 1));
  detail::Selector<E> sel{env, phi, vset, derive_seed(cfg.seed, 9), result};
  sel.offer(net, 0);
  auto opt = detail::make_optimizer(cfg);
  ReplayBuffer<QLabelRecord> buffer(cfg.buffer_capacity);

  struct Visit {
    int t;
    State s;
    std::size_t trace;
  };
  for (int k = 1; k <= cfg.iterations; ++k) {
    CounterRng rng(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(k)));
    const auto mode = loss == HlLoss::kMac ? NetPolicy<State>::Mode::kSoftmax : NetPolicy<State>::Mode::kGreedy;
    NetPolicy<State> behaviour(phi, net, mode);
    std::vector<Visit> visits;
    double train_ret = 0.0;
    for (int r = 0; r < cfg.rollouts_per_iteration; ++r) {
      const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(train.size()) - 1));
      const auto traj = rollout(env, behaviour, train[idx], derive_seed(cfg.seed, 3, rng()));
      train_ret += traj.total_return / cfg.rollouts_per_iteration;
      for (const auto& st : traj.steps) visits.push_back({st.t, st.state, idx});
    }
    if (cfg.label_cap > 0 && static_cast<int>(visits.size()) > cfg.label_cap) {
      rng.shuffle(visits);
      visits.resize(static_cast<std::size_t>(cfg.label_cap));
    }
    std::vector<QLabelRecord> records(visits.size());
    parallel_for(visits.size(), cfg.workers, [&](std::size_t i) {
      const auto& v = visits[i];
      const auto suffix = train[v.trace].suffix(v.t);
      const std::span<const InputOf<E>> one[1] = {suffix};
      const auto est = surrogate::q_dagger(env, planner, v.t, v.s, std::span<const std::span<const InputOf<E>>>(one));
      records[i] = {v.t, phi.all(v.s, est.actions, v.t), est.mean, v.trace, est.exact};
    });
    for (auto& rec : records) {
      ++result.labels;
      if (!rec.exact) ++result.inexact_labels;
      buffer.append(std::move(rec));
    }
    double loss_sum = 0.0;
    for (int g = 0; g < cfg.grad_steps; ++g) {
      const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
      if (loss == HlLoss::kMac) {
        auto obj = mac_objective(net, batch, cfg.entropy_coef);
        loss_sum -= obj.value;
        detail::ascend(opt, net, std::move(obj.grad));
      } else {
        auto obj = qdistill_objective(net, batch);
        loss_sum += obj.value;
        opt.step(net.params(), obj.grad);
      }
    }
    const double v = sel.offer(net, k);
    result.curve.push_back({k, cfg.grad_steps > 0 ? loss_sum / cfg.grad_steps : 0.0, train_ret, v});
  }
  return result;
}

namespace detail {

struct Transition {
  std::vector<double> features;                 // phi(s, a)
  double reward = 0.0;
  std::vector<std::vector<double>> next;        // phi(s', a') rows; empty if terminal
};

template <ExoEnv E>
std::vector<Transition> transitions_of(const Featurizer<StateOf<E>>& phi, const E& env, const TrajectoryOf<E>& traj) {
  std::vector<Transition> out;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const auto& st = traj.steps[i];
    Transition tr{phi(st.state, st.action, st.t), st.reward, {}};
    if (i + 1 < traj.steps.size()) {
      const auto& nx = traj.steps[i + 1];
      tr.next = phi.all(nx.state, env.actions(nx.state), nx.t);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace detail

/// Double Q-learning with a smoothed target network and linearly decaying
/// epsilon-greedy exploration.
template <ExoEnv E>
TrainResult dqn_train(const E& env, const Featurizer<StateOf<E>>& phi, std::span<const ExoTrace<InputOf<E>>> train,
                      std::span<const ExoTrace<InputOf<E>>> val, const TrainConfig& cfg) {
  using State = StateOf<E>;
  cfg.validate();
  if (train.empty()) throw EmptyDataset("training set is empty");
  TrainResult result;
  neural::Mlp online = neural::Mlp::glorot(phi.dim, cfg.hidden, derive_seed(cfg.seed, 1));
  neural::Mlp target = online;
  detail::Selector<E> sel{env, phi, detail::validation_or(val, train), derive_seed(cfg.seed, 9), result};
  sel.offer(online, 0);
  auto opt = detail::make_optimizer(cfg);
  ReplayBuffer<detail::Transition> buffer(cfg.buffer_capacity);
  for (int k = 1; k <= cfg.iterations; ++k) {
    CounterRng rng(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(k)));
    NetPolicy<State> behaviour(phi, online, NetPolicy<State>::Mode::kEpsilon, detail::epsilon_at(cfg, k));
    double train_ret = 0.0;
    for (int r = 0; r < cfg.rollouts_per_iteration; ++r) {
      const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(train.size()) - 1));
      const auto traj = rollout(env, behaviour, train[idx], derive_seed(cfg.seed, 3, rng()));
      train_ret += traj.total_return / cfg.rollouts_per_iteration;
      for (auto& tr : detail::transitions_of(phi, env, traj)) buffer.append(std::move(tr));
    }
    double loss_sum = 0.0;
    for (int g = 0; g < cfg.grad_steps; ++g) {
      const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
      std::vector<Regression> reg;
      reg.reserve(batch.size());
      for (const auto& tr : batch) {
        double y = tr.reward;
        if (!tr.next.empty()) {
          std::vector<double> q;
          for (const auto& f : tr.next) q.push_back(online.forward(f));
          std::size_t best = 0;
          for (std::size_t a = 1; a < q.size(); ++a) {
            if (q[a] > q[best]) best = a;
          }
          y += cfg.gamma * target.forward(tr.next[best]);
        }
        reg.push_back({tr.features, y});
      }
      auto obj = squared_error(online, reg);
      loss_sum += obj.value;
      opt.step(online.params(), obj.grad);
      detail::soft_update(target, online, cfg.tau);
    }
    const double v = sel.offer(online, k);
    result.curve.push_back({k, cfg.grad_steps > 0 ? loss_sum / cfg.grad_steps : 0.0, train_ret, v});
  }
  return result;
}

enum class ActorLoss { kSampledAction, kAllActions };

/// Actor-critic with a learned Q critic (expected-SARSA targets through a
/// smoothed target copy). kSampledAction is the classic score-function
/// actor; kAllActions sums pi(a|s) Q(s,a) over every action (mean
/// actor-critic).
template <ExoEnv E>
TrainResult actor_critic_train(const E& env, const Featurizer<StateOf<E>>& phi,
                               std::span<const ExoTrace<InputOf<E>>> train, std::span<const ExoTrace<InputOf<E>>> val,
                               const TrainConfig& cfg, ActorLoss actor_loss) {
  using State = StateOf<E>;
  cfg.validate();
  if (train.empty()) throw EmptyDataset("training set is empty");
  TrainResult result;
  neural::Mlp actor = neural::Mlp::glorot(phi.dim, cfg.hidden, derive_seed(cfg.seed, 1));
  neural::Mlp critic = neural::Mlp::glorot(phi.dim, cfg.hidden, derive_seed(cfg.seed, 4));
  neural::Mlp critic_target = critic;
  detail::Selector<E> sel{env, phi, detail::validation_or(val, train), derive_seed(cfg.seed, 9), result};
  sel.offer(actor, 0);
  auto actor_opt = detail::make_optimizer(cfg);
  auto critic_opt = detail::make_optimizer(cfg);
  ReplayBuffer<detail::Transition> buffer(cfg.buffer_capacity);

  auto policy_over = [&](const std::vector<std::vector<double>>& rows) {
    std::vector<double> s;
    for (const auto& f : rows) s.push_back(actor.forward(f));
    return neural::softmax(s);
  };

  for (int k = 1; k <= cfg.iterations; ++k) {
    CounterRng rng(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(k)));
    NetPolicy<State> behaviour(phi, actor, NetPolicy<State>::Mode::kSoftmax);
    double train_ret = 0.0;
    std::vector<std::pair<std::vector<std::vector<double>>, int>> fresh;  // (rows, taken)
    for (int r = 0; r < cfg.rollouts_per_iteration; ++r) {
      const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(train.size()) - 1));
      const auto traj = rollout(env, behaviour, train[idx], derive_seed(cfg.seed, 3, rng()));
      train_ret += traj.total_return / cfg.rollouts_per_iteration;
      for (auto& tr : detail::transitions_of(phi, env, traj)) buffer.append(std::move(tr));
      for (const auto& st : traj.steps) {
        const auto acts = env.actions(st.state);
        const auto taken = static_cast<int>(std::find(acts.begin(), acts.end(), st.action) - acts.begin());
        fresh.emplace_back(phi.all(st.state, acts, st.t), taken);
      }
    }
    double loss_sum = 0.0;
    for (int g = 0; g < cfg.grad_steps; ++g) {
      const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
      std::vector<Regression> reg;
      reg.reserve(batch.size());
      for (const auto& tr : batch) {
        double y = tr.reward;
        if (!tr.next.empty()) {
          const auto p = policy_over(tr.next);
          for (std::size_t a = 0; a < p.size(); ++a) y += cfg.gamma * p[a] * critic_target.forward(tr.next[a]);
        }
        reg.push_back({tr.features, y});
      }
      auto cobj = squared_error(critic, reg);
      loss_sum += cobj.value;
      critic_opt.step(critic.params(), cobj.grad);
      detail::soft_update(critic_target, critic, cfg.tau);

      const auto n = std::min(fresh.size(), static_cast<std::size_t>(cfg.batch_size));
      if (actor_loss == ActorLoss::kAllActions) {
        std::vector<QLabelRecord> recs;
        for (std::size_t i = 0; i < n; ++i) {
          const auto& rows = fresh[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(fresh.size()) - 1))].first;
          QLabelRecord rec;
          rec.features = rows;
          for (const auto& f : rows) rec.labels.push_back(critic.forward(f));
          recs.push_back(std::move(rec));
        }
        auto aobj = mac_objective(actor, recs, cfg.entropy_coef);
        detail::ascend(actor_opt, actor, std::move(aobj.grad), cfg.actor_coef);
      } else {
        std::vector<PgSample> smp;
        for (std::size_t i = 0; i < n; ++i) {
          const auto& [rows, taken] = fresh[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(fresh.size()) - 1))];
          const auto p = policy_over(rows);
          double v = 0.0, q_taken = 0.0;
          for (std::size_t a = 0; a < rows.size(); ++a) {
            const double q = critic.forward(rows[a]);
            v += p[a] * q;
            if (static_cast<int>(a) == taken) q_taken = q;
          }
          smp.push_back({rows, taken, q_taken - v});
        }
        auto aobj = pg_objective(actor, smp, cfg.entropy_coef);
        detail::ascend(actor_opt, actor, std::move(aobj.grad), cfg.actor_coef);
      }
    }
    const double v = sel.offer(actor, k);
    result.curve.push_back({k, cfg.grad_steps > 0 ? loss_sum / cfg.grad_steps : 0.0, train_ret, v});
  }
  return result;
}

template <ExoEnv E>
TrainResult ac_train(const E& env, const Featurizer<StateOf<E>>& phi, std::span<const ExoTrace<InputOf<E>>> train,
                     std::span<const ExoTrace<InputOf<E>>> val, const TrainConfig& cfg) {
  return actor_critic_train(env, phi, train, val, cfg, ActorLoss::kSampledAction);
}

template <ExoEnv E>
TrainResult mac_train(const E& env, const Featurizer<StateOf<E>>& phi, std::span<const ExoTrace<InputOf<E>>> train,
                      std::span<const ExoTrace<InputOf<E>>> val, const TrainConfig& cfg) {
  return actor_critic_train(env, phi, train, val, cfg, ActorLoss::kAllActions);
}

/// Discounted return of `policy` from post-step state `pre` at time t over
/// suffix xi_t..xi_T (the policy is reset first).
template <ExoEnv E>
double discounted_value_from(const E& env, Policy<StateOf<E>>& policy, int t, StateOf<E> pre,
                             std::span<const InputOf<E>> suffix, double gamma, std::uint64_t seed) {
  policy.reset();
  CounterRng rng(seed);
  double total = 0.0, disc = 1.0;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    const auto s = env.observe(pre, suffix[i]);
    const auto acts = env.actions(s);
    const Action a = policy.act(s, t + static_cast<int>(i), acts, rng);
    auto tr = env.step(s, a, suffix[i]);
    total += disc * tr.reward;
    disc *= gamma;
    pre = std::move(tr.next);
  }
  return total;
}

/// Per-step advantages for the hindsight-baseline policy gradient:
/// A_t = G_t - (r_t + gamma * V^baseline(s_{t+1}; xi_{>t})), where the
/// baseline value is simulated on the same trace.
template <ExoEnv E>
std::vector<double> pg_advantages(const E& env, const TrajectoryOf<E>& traj, const ExoTrace<InputOf<E>>& trace,
                                  Policy<StateOf<E>>& baseline, double gamma) {
  const auto n = traj.steps.size();
  std::vector<double> g(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) g[i] = traj.steps[i].reward + gamma * g[i + 1];
  std::vector<double> adv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = traj.steps[i];
    const double b = st.reward + gamma * discounted_value_from(env, baseline, st.t + 1, st.next,
                                                               trace.suffix(st.t + 1), gamma, 0);
    adv[i] = g[i] - b;
  }
  return adv;
}

/// REINFORCE with the simulated hindsight baseline Q^baseline(s, a, xi_{>=t}).
template <ExoEnv E>
TrainResult pg_hindsight_baseline_train(const E& env, const Featurizer<StateOf<E>>& phi,
                                        std::span<const ExoTrace<InputOf<E>>> train,
                                        std::span<const ExoTrace<InputOf<E>>> val, const TrainConfig& cfg,
                                        Policy<StateOf<E>>& baseline) {
  using State = StateOf<E>;
  cfg.validate();
  if (train.empty()) throw EmptyDataset("training set is empty");
  TrainResult result;
  neural::Mlp net = neural::Mlp::glorot(phi.dim, cfg.hidden, derive_seed(cfg.seed, 1));
  detail::Selector<E> sel{env, phi, detail::validation_or(val, train), derive_seed(cfg.seed, 9), result};
  sel.offer(net, 0);
  auto opt = detail::make_optimizer(cfg);
  for (int k = 1; k <= cfg.iterations; ++k) {
    CounterRng rng(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(k)));
    NetPolicy<State> behaviour(phi, net, NetPolicy<State>::Mode::kSoftmax);
    double train_ret = 0.0;
    std::vector<PgSample> fresh;
    for (int r = 0; r < cfg.rollouts_per_iteration; ++r) {
      const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(train.size()) - 1));
      const auto traj = rollout(env, behaviour, train[idx], derive_seed(cfg.seed, 3, rng()));
      train_ret += traj.total_return / cfg.rollouts_per_iteration;
      const auto adv = pg_advantages(env, traj, train[idx], baseline, cfg.gamma);
      for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        const auto& st = traj.steps[i];
        const auto acts = env.actions(st.state);
        const auto taken = static_cast<int>(std::find(acts.begin(), acts.end(), st.action) - acts.begin());
        fresh.push_back({phi.all(st.state, acts, st.t), taken, adv[i]});
      }
    }
    double loss_sum = 0.0;
    for (int g = 0; g < cfg.grad_steps && !fresh.empty(); ++g) {
      std::vector<PgSample> batch;
      const auto n = std::min(fresh.size(), static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t i = 0; i < n; ++i) {
        batch.push_back(fresh[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(fresh.size()) - 1))]);
      }
      auto obj = pg_objective(net, batch, cfg.entropy_coef);
      loss_sum -= obj.value;
      detail::ascend(opt, net, std::move(obj.grad));
    }
    const double v = sel.offer(net, k);
    result.curve.push_back({k, cfg.grad_steps > 0 ? loss_sum / cfg.grad_steps : 0.0, train_ret, v});
  }
  return result;
}

/// Empirical-return argmax over a finite policy class (lowest index on ties).
template <ExoEnv E>
std::size_t erm_search(const E& env, std::span<const ExoTrace<InputOf<E>>> data,
                       const std::vector<PolicyPtr<StateOf<E>>>& policies, std::uint64_t seed = 0) {
  if (policies.empty()) throw ConfigError("ERM needs a nonempty policy class");
  if (data.empty()) throw EmptyDataset("ERM needs data");
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const double v = mean_return(env, *policies[i], data, seed);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

}  // namespace hindsight::learn
