#pragma once

// Hindsight surrogate pi-dagger: Q-dagger estimates, the hindsight bias, and
// an exact dynamic-programming engine over an enumerated trace distribution.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/core/policy.hpp"
#include "hindsight/core/rng.hpp"
#include "hindsight/core/stats.hpp"
#include "hindsight/envs/tabular.hpp"
#include "hindsight/planners/exhaustive.hpp"

namespace hindsight::surrogate {

inline constexpr double kTieTolerance = 1e-12;

/// Index of the largest value; values within kTieTolerance of the maximum
/// resolve to the smallest action id.
inline std::size_t argmax_lowest(std::span<const Action> actions, std::span<const double> values) {
  if (values.empty()) throw NoFeasibleAction("argmax over an empty action set");
  double best = values[0];
  for (double v : values) best = std::max(best, v);
  std::size_t pick = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= best - kTieTolerance && (pick == values.size() || actions[i] < actions[pick])) pick = i;
  }
  return pick;
}

struct QDagEstimate {
  std::vector<Action> actions;
  std::vector<double> mean;
  std::vector<double> stderr_;
  int samples = 0;
  bool exact = true;  // every planner call proved optimality

  double at(Action a) const {
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (actions[i] == a) return mean[i];
    }
    throw InvalidAction("action not covered by the estimate");
  }
};

/// Q-dagger_t(s, a) averaged over trace suffixes xi_t..xi_T: the reward of a
/// now plus the planner's hindsight value from f(s, a, xi_t) onwards.
/// `s` is the decision state (already observed).
template <ExoEnv E, class Planner>
QDagEstimate q_dagger(const E& env, const Planner& planner, int t, const StateOf<E>& s,
                      std::span<const std::span<const InputOf<E>>> suffixes) {
  if (suffixes.empty()) throw EmptyDataset("q_dagger needs at least one suffix");
  QDagEstimate est;
  est.actions = env.actions(s);
  est.samples = static_cast<int>(suffixes.size());
  for (Action a : est.actions) {
    std::vector<double> vals;
    vals.reserve(suffixes.size());
    for (const auto& suf : suffixes) {
      if (suf.empty()) throw Error("q_dagger suffix must contain xi_t");
      auto tr = env.step(s, a, suf.front());
      double v = tr.reward;
      if (suf.size() > 1) {
        const auto plan = planner(env, t + 1, tr.next, suf.subspan(1));
        est.exact = est.exact && plan.exact;
        v += plan.value;
      }
      vals.push_back(v);
    }
    const auto ms = mean_and_stderr(vals);
    est.mean.push_back(ms.mean);
    est.stderr_.push_back(ms.stderr_);
  }
  return est;
}

inline Action pi_dagger_action(const QDagEstimate& est) {
  return est.actions[argmax_lowest(est.actions, est.mean)];
}

struct HindsightBias {
  int t = 0;
  Action pi_dagger = 0;
  Action pi_star = 0;
  double q_dag_at_dag = 0.0;    // Q-dagger(s, pi-dagger(s))
  double q_star_at_dag = 0.0;   // Q-star(s, pi-dagger(s))
  double q_star_at_star = 0.0;  // Q-star(s, pi-star(s))
  double q_dag_at_star = 0.0;   // Q-dagger(s, pi-star(s))
  double delta = 0.0;
};

/// Four-term hindsight bias at one state; both value vectors are aligned
/// with `actions`.
inline HindsightBias delta_dagger(int t, std::span<const Action> actions, std::span<const double> q_dag,
                                  std::span<const double> q_star) {
  HindsightBias b;
  b.t = t;
  const auto i_dag = argmax_lowest(actions, q_dag);
  const auto i_star = argmax_lowest(actions, q_star);
  b.pi_dagger = actions[i_dag];
  b.pi_star = actions[i_star];
  b.q_dag_at_dag = q_dag[i_dag];
  b.q_star_at_dag = q_star[i_dag];
  b.q_star_at_star = q_star[i_star];
  b.q_dag_at_star = q_dag[i_star];
  b.delta = b.q_dag_at_dag - b.q_star_at_dag + b.q_star_at_star - b.q_dag_at_star;
  return b;
}

inline HindsightBias delta_dagger(int t, const QDagEstimate& q_dag, std::span<const double> q_star) {
  return delta_dagger(t, q_dag.actions, q_dag.mean, q_star);
}

/// Uniform distribution over a dataset (the empirical MDP).
template <class Input>
envs::TraceDistribution<Input> empirical_mdp(const std::vector<ExoTrace<Input>>& data) {
  return envs::uniform_over(data);
}

struct RegretReport {
  double v_star = 0.0;
  double v_dagger = 0.0;
  double regret = 0.0;  // v_star - v_dagger
  double bound = 0.0;   // sum_t E_{S_t ~ pi-dagger}[Delta-dagger_t(S_t)]
};

/// Exact Q-star / Q-dagger / policy values for a finite trace distribution.
///
/// Traces are organised as a prefix tree; a node at depth d holds every
/// trace sharing xi_1..xi_d, so conditioning on a node is conditioning on
/// the observed prefix. At decision time t the conditioning node has depth
/// t-1, or depth t when the environment reveals xi_t before acting.
template <KeyedEnv E, class Planner = ExhaustivePlanner>
class ExactDp {
 public:
  using State = StateOf<E>;
  using Input = InputOf<E>;

  ExactDp(const E& env, envs::TraceDistribution<Input> dist, Planner planner = {},
          std::size_t memo_limit = 4'000'000)
      : env_(env), dist_(std::move(dist)), planner_(std::move(planner)), memo_limit_(memo_limit) {
    if (dist_.empty()) throw EmptyDataset("trace distribution is empty");
    for (const auto& [tr, p] : dist_) {
      if (tr.length() != env_.horizon()) throw Error("trace length does not match the horizon");
      (void)p;
    }
    build_tree();
  }

  int horizon() const { return env_.horizon(); }
  static constexpr int root() { return 0; }
  int node_depth(int node) const { return nodes_[static_cast<std::size_t>(node)].depth; }
  double node_mass(int node) const { return nodes_[static_cast<std::size_t>(node)].mass; }
  const std::vector<int>& children(int node) const { return nodes_[static_cast<std::size_t>(node)].children; }
  /// xi_depth shared by every trace in the node (depth >= 1).
  const Input& node_input(int node) const {
    const auto& n = nodes_[static_cast<std::size_t>(node)];
    return dist_[static_cast<std::size_t>(n.members.front())].first.input(n.depth);
  }

  /// Node whose traces start with `prefix`; -1 when no trace does.
  int node_of_prefix(std::span<const Input> prefix) const {
    int node = root();
    for (const auto& xi : prefix) {
      int next = -1;
      for (int c : children(node)) {
        if (node_input(c) == xi) next = c;
      }
      if (next < 0) return -1;
      node = next;
    }
    return node;
  }

  /// Depth of the conditioning node for a decision at time t.
  static constexpr int decision_depth(int t) { return E::kRevealsCurrentInput ? t : t - 1; }

  /// Q-star_t(s, a | node) for every feasible action of s.
  std::vector<double> q_star(int t, const State& s, int node) {
    const auto acts = env_.actions(s);
    std::vector<double> out;
    out.reserve(acts.size());
    for (Action a : acts) out.push_back(q_star_action(t, s, a, node));
    return out;
  }

  /// V-star_t(s | node) = max_a Q-star.
  double v_star(int t, const State& s, int node) {
    const std::string key = memo_key('v', t, s, node);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const auto q = q_star(t, s, node);
    double best = -std::numeric_limits<double>::infinity();
    for (double v : q) best = std::max(best, v);
    return remember(key, best);
  }

  /// Expected optimal value-to-go from the post-step state `pre` at time t,
  /// conditioned on the depth t-1 node.
  double w_star(int t, const State& pre, int node) {
    if (t > horizon()) return 0.0;
    if constexpr (E::kRevealsCurrentInput) {
      double total = 0.0;
      for (int g : children(node)) {
        total += node_mass(g) / node_mass(node) * v_star(t, env_.observe(pre, node_input(g)), g);
      }
      return total;
    } else {
      return v_star(t, pre, node);
    }
  }

  double v_star_root() { return w_star(1, env_.initial_state(), root()); }

  /// Exact Q-dagger_t(s, a | node): the node-weighted mean of
  /// r(s, a, xi_t) + Hindsight(t+1, f(s, a, xi_t), xi_{>t}).
  std::vector<double> q_dagger(int t, const State& s, int node) {
    const auto acts = env_.actions(s);
    std::vector<double> out;
    out.reserve(acts.size());
    const auto& n = nodes_[static_cast<std::size_t>(node)];
    for (Action a : acts) {
      const std::string key = memo_key('d', t, s, node, a);
      if (auto it = memo_.find(key); it != memo_.end()) {
        out.push_back(it->second);
        continue;
      }
      double total = 0.0;
      for (int i : n.members) {
        const auto& [tr, p] = dist_[static_cast<std::size_t>(i)];
        auto step = env_.step(s, a, tr.input(t));
        double v = step.reward;
        if (t < horizon()) {
          const auto plan = planner_(env_, t + 1, step.next, tr.suffix(t + 1));
          if (!plan.exact) inexact_ = true;
          v += plan.value;
        }
        total += p * v;
      }
      out.push_back(remember(key, total / n.mass));
    }
    return out;
  }

  Action pi_dagger(int t, const State& s, int node) {
    const auto acts = env_.actions(s);
    const auto q = q_dagger(t, s, node);
    return acts[argmax_lowest(acts, q)];
  }

  Action pi_star(int t, const State& s, int node) {
    const auto acts = env_.actions(s);
    const auto q = q_star(t, s, node);
    return acts[argmax_lowest(acts, q)];
  }

  HindsightBias bias(int t, const State& s, int node) {
    const auto acts = env_.actions(s);
    const auto qd = q_dagger(t, s, node);
    const auto qs = q_star(t, s, node);
    return delta_dagger(t, acts, qd, qs);
  }

  /// Exact expected return of a deterministic non-anticipatory policy
  /// given as pi(t, decision state) -> action.
  template <class PolicyFn>
  double policy_value(PolicyFn&& pi) {
    return walk(1, env_.initial_state(), root(), pi, nullptr);
  }

  /// Regret of pi-dagger against the bias sum along pi-dagger's own state
  /// distribution.
  RegretReport regret_report() {
    RegretReport r;
    r.v_star = v_star_root();
    double bound = 0.0;
    auto pi = [this](int t, const State& s, int node) { return pi_dagger(t, s, node); };
    r.v_dagger = walk(1, env_.initial_state(), root(), pi, &bound);
    r.regret = r.v_star - r.v_dagger;
    r.bound = bound;
    return r;
  }

  /// True if any planner call returned an unproven plan.
  bool inexact() const { return inexact_; }
  std::size_t memo_size() const { return memo_.size(); }

 private:
  struct Node {
    int depth = 0;
    double mass = 0.0;
    std::vector<int> members{};
    std::vector<int> children{};
  };

  void build_tree() {
    Node root_node;
    for (std::size_t i = 0; i < dist_.size(); ++i) {
      root_node.members.push_back(static_cast<int>(i));
      root_node.mass += dist_[i].second;
    }
    if (!(root_node.mass > 0.0)) throw Error("trace distribution has zero mass");
    nodes_.push_back(std::move(root_node));
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      if (nodes_[k].depth >= horizon()) continue;
      const int d = nodes_[k].depth + 1;
      std::vector<int> kids;
      for (int i : nodes_[k].members) {
        const auto& xi = dist_[static_cast<std::size_t>(i)].first.input(d);
        int found = -1;
        for (int c : kids) {
          const auto& rep = nodes_[static_cast<std::size_t>(c)];
          if (dist_[static_cast<std::size_t>(rep.members.front())].first.input(d) == xi) found = c;
        }
        if (found < 0) {
          Node n;
          n.depth = d;
          nodes_.push_back(std::move(n));
          found = static_cast<int>(nodes_.size()) - 1;
          kids.push_back(found);
        }
        nodes_[static_cast<std::size_t>(found)].members.push_back(i);
        nodes_[static_cast<std::size_t>(found)].mass += dist_[static_cast<std::size_t>(i)].second;
      }
      nodes_[k].children = std::move(kids);
    }
  }

  std::string memo_key(char kind, int t, const State& s, int node, Action a = 0) const {
    return std::string(1, kind) + std::to_string(t) + '|' + std::to_string(node) + '|' + std::to_string(a) + '|' +
           env_.state_key(s);
  }

  double remember(const std::string& key, double v) {
    if (memo_.size() >= memo_limit_) throw StateSpaceTooLarge("exact DP memo exceeded its limit");
    memo_.emplace(key, v);
    return v;
  }

  double q_star_action(int t, const State& s, Action a, int node) {
    const std::string key = memo_key('q', t, s, node, a);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double v = 0.0;
    if constexpr (E::kRevealsCurrentInput) {
      const auto step = env_.step(s, a, node_input(node));
      v = step.reward + w_star(t + 1, step.next, node);
    } else {
      for (int g : children(node)) {
        const auto step = env_.step(s, a, node_input(g));
        v += node_mass(g) / node_mass(node) * (step.reward + w_star(t + 1, step.next, g));
      }
    }
    return remember(key, v);
  }

  /// Expected return of `pi` from post-step state `pre` at time t (node at
  /// depth t-1); accumulates the bias along the way when `bias_sum` is set.
  template <class PolicyFn>
  double walk(int t, const State& pre, int node, PolicyFn& pi, double* bias_sum) {
    if (t > horizon()) return 0.0;
    const double reach = node_mass(node) / nodes_.front().mass;
    auto decide = [&](const State& s, int cond, double weight) {
      const Action a = pi(t, s, cond);
      if (!is_feasible(env_, s, a)) throw InvalidAction("policy chose an infeasible action");
      if (bias_sum) *bias_sum += weight * bias(t, s, cond).delta;
      double v = 0.0;
      if constexpr (E::kRevealsCurrentInput) {
        const auto step = env_.step(s, a, node_input(cond));
        v = step.reward + walk(t + 1, step.next, cond, pi, bias_sum);
      } else {
        for (int g : children(cond)) {
          const auto step = env_.step(s, a, node_input(g));
          v += node_mass(g) / node_mass(cond) * (step.reward + walk(t + 1, step.next, g, pi, bias_sum));
        }
      }
      return v;
    };
    if constexpr (E::kRevealsCurrentInput) {
      double total = 0.0;
      for (int g : children(node)) {
        const double share = node_mass(g) / node_mass(node);
        total += share * decide(env_.observe(pre, node_input(g)), g, reach * share);
      }
      return total;
    } else {
      return decide(pre, node, reach);
    }
  }

  const E& env_;
  envs::TraceDistribution<Input> dist_;
  Planner planner_;
  std::size_t memo_limit_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, double> memo_;
  bool inexact_ = false;
};

/// Standalone pi-dagger: at each decision, draws M dataset traces with a
/// counter-based stream and plans over their suffixes from t. For
/// environments that reveal xi_t, the current input is already part of the
/// decision state, so the sampled xi_t is never used by step().
template <ExoEnv E, class Planner>
class PiDaggerPolicy final : public Policy<StateOf<E>> {
 public:
  PiDaggerPolicy(const E& env, Planner planner, std::vector<ExoTrace<InputOf<E>>> data, int samples,
                 std::uint64_t seed)
      : env_(env), planner_(std::move(planner)), data_(std::move(data)), samples_(samples), seed_(seed) {
    if (data_.empty()) throw EmptyDataset("pi-dagger needs a dataset");
    if (samples_ < 1) throw ConfigError("pi-dagger needs at least one suffix sample");
  }

  void reset() override { calls_ = 0; }

  Action act(const StateOf<E>& s, int t, std::span<const Action>, CounterRng&) override {
    CounterRng pick(derive_seed(seed_, static_cast<std::uint64_t>(t), calls_++));
    std::vector<std::span<const InputOf<E>>> suffixes;
    suffixes.reserve(static_cast<std::size_t>(samples_));
    for (int m = 0; m < samples_; ++m) {
      const auto& tr = data_[static_cast<std::size_t>(pick.uniform_int(0, static_cast<long long>(data_.size()) - 1))];
      suffixes.push_back(tr.suffix(t));
    }
    return pi_dagger_action(q_dagger(env_, planner_, t, s, std::span<const std::span<const InputOf<E>>>(suffixes)));
  }

 private:
  const E& env_;
  Planner planner_;
  std::vector<ExoTrace<InputOf<E>>> data_;
  int samples_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

}  // namespace hindsight::surrogate
