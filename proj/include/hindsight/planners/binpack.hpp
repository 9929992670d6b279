#pragma once

#include <span>
#include <vector>

#include "hindsight/envs/binpack.hpp"
#include "hindsight/planners/plan.hpp"

namespace hindsight::planners {

/// Minimum number of new bins needed to pack `items` in order, starting from
/// occupancy `counts` (counts[u-1] = bins at level u). Depth-first
/// branch-and-bound over bin-level choices with the bound
/// ceil((sum of remaining sizes - free space in open bins) / B).
/// Value is -(new bins); actions are bin-packing env actions (0 = new bin,
/// a > 0 = bin at level a). On budget exhaustion the incumbent is returned
/// with exact = false.
HindsightPlan binpack_hindsight(const std::vector<int>& counts, std::span<const int> items, int capacity,
                                long long node_budget = 10'000'000);

struct BinPackPlanner {
  long long node_budget = 10'000'000;

  HindsightPlan operator()(const envs::BinPackEnv& env, int t, const envs::BinPackState& pre,
                           std::span<const int> suffix) const;
};

}  // namespace hindsight::planners
