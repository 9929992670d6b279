#pragma once

#include <string>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"

namespace hindsight::envs {

/// Bin occupancy histogram plus the item waiting to be placed.
struct BinPackState {
  std::vector<int> counts;  // counts[u-1] = open bins at utilization u, u in 1..B
  int pending = 0;          // size of the arriving item (0 before the first observation)

  friend bool operator==(const BinPackState&, const BinPackState&) = default;
};

struct BinPackStep {
  BinPackState next;
  double reward = 0.0;
};

/// Reward/transition table for online bin packing:
///   a = 0                     open a new bin at the item's size, reward -1
///   a > 0, x_a > 0, a+u <= B  move one bin from level a to a+u, reward 0
///   otherwise                 reward -100, occupancy unchanged (item dropped)
BinPackStep binpack_step(const BinPackState& state, int action, int capacity);

/// Online bin packing with capacity B. Actions 0..B; items observed before
/// placement (the current item lives in the state).
class BinPackEnv {
 public:
  using State = BinPackState;
  using Input = int;
  static constexpr bool kRevealsCurrentInput = true;

  static constexpr double kOpenBinReward = -1.0;
  static constexpr double kInfeasibleReward = -100.0;

  BinPackEnv(int capacity, int horizon);

  int capacity() const { return capacity_; }
  int horizon() const { return horizon_; }

  State initial_state() const;
  State empty_state() const { return initial_state(); }
  State observe(const State& s, const Input& item) const;
  /// Feasible actions only: 0 plus every occupied level the item fits on.
  std::vector<Action> actions(const State& s) const;
  Transition<State> step(const State& s, Action a, const Input& xi) const;
  RewardRange reward_range() const { return {kInfeasibleReward, 0.0}; }

  int feature_dim() const;
  /// one-hot(t), one-hot(a), counts/T, one-hot(pending), post-decision counts/T,
  /// target level after placement / B, opens-new-bin flag.
  std::vector<double> features(const State& s, Action a, int t) const;

  std::string state_key(const State& s) const;

  /// Total packed mass sum_u u * x_u.
  static int mass(const State& s);
  static int open_bins(const State& s);

 private:
  int capacity_;
  int horizon_;
};

}  // namespace hindsight::envs
