#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"

namespace hindsight::envs {

/// One VM request. arrival_event is 1-based inside the library (files are
/// 0-based); the VM is active on events [arrival_event, arrival_event + lifetime).
struct VmRequest {
  int id = 0;
  int arrival_event = 1;
  int lifetime = 1;
  int cores = 1;
  int memory = 1;

  int end_event() const { return arrival_event + lifetime; }
  friend bool operator==(const VmRequest&, const VmRequest&) = default;
};

/// Exogenous input of one event: at most one request.
struct VmEvent {
  std::optional<VmRequest> request;
  friend bool operator==(const VmEvent&, const VmEvent&) = default;
};

struct PlacedVm {
  int id = 0;
  int cores = 0;
  int memory = 0;
  int end_event = 0;  // first event at which the VM is gone
  friend bool operator==(const PlacedVm&, const PlacedVm&) = default;
};

struct PmState {
  int cpu_capacity = 0;
  int mem_capacity = 0;
  int used_cores = 0;
  int used_memory = 0;
  std::vector<PlacedVm> vms;
  /// Core utilization after each of the last three events, most recent first.
  std::array<double, 3> util_history{};

  bool utilized() const { return !vms.empty(); }
  bool fits(const VmRequest& r) const {
    return used_cores + r.cores <= cpu_capacity && used_memory + r.memory <= mem_capacity;
  }
  int remaining_cores() const { return cpu_capacity - used_cores; }
  friend bool operator==(const PmState&, const PmState&) = default;
};

struct ClusterState {
  std::vector<PmState> pms;
  std::optional<VmRequest> request;
  int clock = 0;  // event index of the current decision; 0 before the first
  int failed = 0; // failed allocations so far

  friend bool operator==(const ClusterState&, const ClusterState&) = default;
};

struct VmClusterConfig {
  int pm_count = 10;
  int cpu_capacity = 16;
  int mem_capacity = 64;
  int horizon = 20;
};

/// sum of used cores / sum of capacity over utilized PMs; 1 when none is utilized.
double packing_density(const ClusterState& state);
int utilized_pms(const ClusterState& state);

struct VmStep {
  ClusterState next;
  double reward = 0.0;
  bool failed = false;
};

/// Places the pending request on `action` (or fails it) and returns
/// reward -100 * failed - 1 / packing_density(next).
VmStep vm_step(const ClusterState& state, Action action);

/// Advances the clock to `event`, drops VMs whose lifetime ended, and sets
/// the pending request.
ClusterState vm_observe(const ClusterState& state, int event, const VmEvent& ev);

class VmClusterEnv {
 public:
  using State = ClusterState;
  using Input = VmEvent;
  static constexpr bool kRevealsCurrentInput = true;

  static constexpr double kFailPenalty = -100.0;
  static constexpr int kFeatureDim = 20;

  explicit VmClusterEnv(VmClusterConfig config);

  const VmClusterConfig& config() const { return config_; }
  int horizon() const { return config_.horizon; }
  State initial_state() const;
  State observe(const State& s, const Input& ev) const { return vm_observe(s, s.clock + 1, ev); }
  /// Feasible PM indices; {kFailAction} when none fits or no request is pending.
  std::vector<Action> actions(const State& s) const;
  Transition<State> step(const State& s, Action a, const Input& ev) const;
  RewardRange reward_range() const;
  std::string state_key(const State& s) const;

  int feature_dim() const { return kFeatureDim; }
  /// Request cores/memory/lifetime, PM capacities and utilization (before,
  /// after, last three events), lifetime alignment with the PM's VMs,
  /// cluster density before/after, fail flag, bias.
  std::vector<double> features(const State& s, Action a, int t) const;

 private:
  VmClusterConfig config_;
};

}  // namespace hindsight::envs
