#include "hindsight/planners/inventory.hpp"

#include <algorithm>
#include <limits>

namespace hindsight::planners {

HindsightPlan inventory_hindsight(const envs::InventoryParams& params, const envs::InventoryState& pre,
                                  std::span<const int> demands) {
  const int n = static_cast<int>(demands.size());
  const int lead = params.lead_time;
  HindsightPlan plan;
  plan.actions.reserve(demands.size());
  envs::InventoryState state = pre;
  bool within_limit = true;
  for (int i = 0; i < n; ++i) {
    int order = 0;
    if (i + lead < n) {
      // Simulate periods i..i+L-1 with the pipeline as it stands; what is
      // left on hand when this order lands is what it has to top up.
      envs::InventoryState probe = state;
      envs::InventoryParams no_limit = params;
      no_limit.max_order = std::numeric_limits<int>::max();
      for (int k = 0; k < lead; ++k) probe = envs::inventory_step(probe, 0, demands[static_cast<std::size_t>(i + k)], no_limit).next;
      const int target = demands[static_cast<std::size_t>(i + lead)];
      order = std::max(0, target - probe.on_hand);
      if (order > params.max_order) {
        within_limit = false;
        order = params.max_order;
      }
    }
    auto step = envs::inventory_step(state, order, demands[static_cast<std::size_t>(i)], params);
    plan.value += step.reward;
    plan.actions.push_back(order);
    state = std::move(step.next);
    ++plan.nodes;
  }
  const bool empty_system =
      pre.on_hand == 0 && std::all_of(pre.pipeline.begin(), pre.pipeline.end(), [](int o) { return o == 0; });
  plan.exact = empty_system && within_limit;
  // Costs are nonnegative, so 0 bounds the optimum; the plan value itself
  // is the bound only when optimality is claimed.
  plan.bound = plan.exact ? plan.value : 0.0;
  return plan;
}

}  // namespace hindsight::planners
