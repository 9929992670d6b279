#pragma once

#include <span>
#include <vector>

#include "hindsight/envs/vm.hpp"
#include "hindsight/planners/milp.hpp"
#include "hindsight/planners/plan.hpp"

namespace hindsight::planners {

/// Denominator of the per-event density term.
///   kActive:    cores of VMs active at that event (historical + suffix);
///               the objective then equals the environment's summed reward.
///   kAllSuffix: historical cores at that event plus the cores of every
///               suffix VM, frozen over the horizon.
enum class DensityDenominator { kActive, kAllSuffix };

/// Placement program for a cluster snapshot and the requests of events
/// t..T. Variables x[v][p] (VM v on PM p) and y[e][p] (PM p utilized at
/// event t+e), all binary. Row families (tags):
///   "assign"  sum_p x[v][p] = 1
///   "cpu"     sum_v CORE_v eta[v][e] x[v][p] <= CPU_p - alpha[e][p]
///   "mem"     sum_v MEM_v eta[v][e] x[v][p] <= MEM_p - beta[e][p]
///   "hist"    y[e][p] >= 1 whenever alpha[e][p] > 0
///   "link"    x[v][p] <= y[e][p] whenever eta[v][e] = 1
///   "or"      y[e][p] - sum_v eta[v][e] x[v][p] <= [alpha[e][p] > 0]
/// Objective: maximize -sum_e sum_p y[e][p] CPU_p / c_e (constant -1 for
/// events with c_e = 0).
struct VmMilp {
  milp::Problem problem;
  int first_event = 1;  // t
  int num_events = 0;
  int num_pms = 0;
  std::vector<envs::VmRequest> vms;          // suffix requests in event order
  std::vector<int> slot;                     // [v] event offset of request v
  std::vector<std::vector<int>> alpha;       // [e][p] historical cores
  std::vector<std::vector<int>> beta;        // [e][p] historical memory
  std::vector<std::vector<int>> eta;         // [v][e]
  std::vector<double> denominator;           // c_e
  std::vector<std::vector<int>> x_index;     // [v][p]
  std::vector<std::vector<int>> y_index;     // [e][p]
};

/// `pre` is the cluster before observing event t; `suffix` holds events t..T.
VmMilp build_vm_milp(const envs::ClusterState& pre, int t, std::span<const envs::VmEvent> suffix,
                     DensityDenominator mode = DensityDenominator::kActive);

/// Decodes a MILP solution into environment actions (kFailAction on events
/// without a request).
std::vector<Action> decode_vm_actions(const VmMilp& m, const std::vector<double>& x, std::span<const envs::VmEvent> suffix);

/// Encodes an action sequence as a MILP point (for warm starts); nullopt if
/// some request is not placed.
std::optional<std::vector<double>> encode_vm_actions(const VmMilp& m, std::span<const Action> actions);

struct VmMilpPlanner {
  long long node_budget = 200'000;
  DensityDenominator mode = DensityDenominator::kActive;

  HindsightPlan operator()(const envs::VmClusterEnv& env, int t, const envs::ClusterState& pre,
                           std::span<const envs::VmEvent> suffix) const;
};

}  // namespace hindsight::planners
