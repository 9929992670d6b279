#pragma once

#include <string>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"

namespace hindsight::envs {

struct InventoryParams {
  int lead_time = 0;      // L
  double holding = 1.0;   // h
  double lost_sale = 1.0; // p
  int max_order = 10;     // n_max
  int horizon = 1;
};

/// pipeline[k] is the order arriving k+1 steps from now, so pipeline[0] is
/// o_1 and pipeline[L-1] is o_L (the most recent order).
struct InventoryState {
  int on_hand = 0;
  std::vector<int> pipeline;

  friend bool operator==(const InventoryState&, const InventoryState&) = default;
};

struct InventoryStep {
  InventoryState next;
  double reward = 0.0;
};

/// One period of lost-sales inventory control:
///   I = on_hand + o_1 (or + order when L = 0)
///   reward = -(h (I - d)^+ + p (d - I)^+), next on_hand = (I - d)^+.
InventoryStep inventory_step(const InventoryState& state, int order, int demand, const InventoryParams& params);

class InventoryEnv {
 public:
  using State = InventoryState;
  using Input = int;
  static constexpr bool kRevealsCurrentInput = false;

  explicit InventoryEnv(InventoryParams params, InventoryState initial = {});

  const InventoryParams& params() const { return params_; }
  int horizon() const { return params_.horizon; }
  State initial_state() const { return initial_; }
  State observe(const State& s, const Input&) const { return s; }
  std::vector<Action> actions(const State& s) const;
  Transition<State> step(const State& s, Action a, const Input& demand) const;
  RewardRange reward_range() const;

  int feature_dim() const { return params_.lead_time + 4; }
  /// on_hand, pipeline, order (all scaled by n_max), t / T.
  std::vector<double> features(const State& s, Action a, int t) const;
  std::string state_key(const State& s) const;

 private:
  InventoryParams params_;
  InventoryState initial_;
};

}  // namespace hindsight::envs
