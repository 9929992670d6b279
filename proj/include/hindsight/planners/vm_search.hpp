#pragma once

#include <span>
#include <vector>

#include "hindsight/envs/vm.hpp"
#include "hindsight/planners/plan.hpp"

namespace hindsight::planners {

/// Depth-first branch-and-bound directly over the VM environment's actions.
/// Identical empty PMs are interchangeable, so only the lowest-indexed one
/// of each capacity class is tried. The per-event bound on -1/density uses
/// the capacity of PMs that already host a VM active at that event plus the
/// smallest set of other PMs that could hold the remaining cores; when a
/// request could ever fail, the bound also allows any subset of future
/// requests to be dropped. The Best-Fit plan seeds the incumbent.
/// On budget exhaustion, returns the incumbent with exact = false and a
/// valid upper bound in `bound`.
struct VmSearchPlanner {
  long long node_budget = 200'000;

  HindsightPlan operator()(const envs::VmClusterEnv& env, int t, const envs::ClusterState& pre,
                           std::span<const envs::VmEvent> suffix) const;
};

/// True when no request in the suffix can fail, whatever the placements:
/// at every request, the other active VMs cannot block all PMs.
bool vm_failures_impossible(const envs::ClusterState& pre, int t, std::span<const envs::VmEvent> suffix);

}  // namespace hindsight::planners
