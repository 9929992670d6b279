#include "hindsight/planners/binpack.hpp"

#include "hindsight/core/errors.hpp"

namespace hindsight::planners {

namespace {

struct BinPackSearch {
  int capacity;
  std::span<const int> items;
  long long budget;
  long long nodes = 0;
  bool out_of_budget = false;
  std::vector<int> counts{};
  std::vector<int> suffix_mass{};  // suffix_mass[i] = sum of items[i..]
  std::vector<Action> path{};
  int best_cost = 0;
  std::vector<Action> best_path{};
  bool improved = false;

  int free_space() const {
    int free = 0;
    for (int u = 1; u <= capacity; ++u) free += counts[static_cast<std::size_t>(u - 1)] * (capacity - u);
    return free;
  }

  int lower_bound(std::size_t i) const {
    const int overflow = suffix_mass[i] - free_space();
    return overflow > 0 ? (overflow + capacity - 1) / capacity : 0;
  }

  void run(std::size_t i, int cost) {
    if (out_of_budget) return;
    if (++nodes > budget) {
      out_of_budget = true;
      return;
    }
    if (cost + lower_bound(i) >= best_cost) return;
    if (i == items.size()) {
      best_cost = cost;
      best_path = path;
      improved = true;
      return;
    }
    const int item = items[i];
    // Same order as BinPackEnv::actions: 0, then occupied levels that fit.
    counts[static_cast<std::size_t>(item - 1)] += 1;
    path.push_back(0);
    run(i + 1, cost + 1);
    path.pop_back();
    counts[static_cast<std::size_t>(item - 1)] -= 1;
    for (int a = 1; a + item <= capacity; ++a) {
      auto& from = counts[static_cast<std::size_t>(a - 1)];
      if (from == 0) continue;
      from -= 1;
      counts[static_cast<std::size_t>(a + item - 1)] += 1;
      path.push_back(a);
      run(i + 1, cost);
      path.pop_back();
      counts[static_cast<std::size_t>(a + item - 1)] -= 1;
      from += 1;
    }
  }
};

/// Best Fit: fullest open bin that still fits the item, else a new bin.
std::pair<int, std::vector<Action>> greedy_plan(std::vector<int> counts, std::span<const int> items, int capacity) {
  int cost = 0;
  std::vector<Action> acts;
  for (int item : items) {
    int chosen = 0;
    for (int a = capacity - item; a >= 1; --a) {
      if (counts[static_cast<std::size_t>(a - 1)] > 0) {
        chosen = a;
        break;
      }
    }
    if (chosen == 0) {
      counts[static_cast<std::size_t>(item - 1)] += 1;
      ++cost;
    } else {
      counts[static_cast<std::size_t>(chosen - 1)] -= 1;
      counts[static_cast<std::size_t>(chosen + item - 1)] += 1;
    }
    acts.push_back(chosen);
  }
  return {cost, acts};
}

}  // namespace

HindsightPlan binpack_hindsight(const std::vector<int>& counts, std::span<const int> items, int capacity,
                                long long node_budget) {
  if (static_cast<int>(counts.size()) != capacity) throw Error("occupancy vector length must equal bin capacity");
  for (int item : items) {
    if (item < 1 || item > capacity) throw Error("bin packing item size out of range: " + std::to_string(item));
  }
  auto [greedy_cost, greedy_actions] = greedy_plan(counts, items, capacity);

  BinPackSearch search{capacity, items, node_budget};
  search.counts = counts;
  search.suffix_mass.assign(items.size() + 1, 0);
  for (std::size_t i = items.size(); i-- > 0;) search.suffix_mass[i] = search.suffix_mass[i + 1] + items[i];
  // One above the greedy cost, so the search still visits every plan that
  // ties the greedy one and keeps the lexicographically smallest.
  search.best_cost = greedy_cost + 1;
  const int root_bound = search.lower_bound(0);
  search.run(0, 0);

  HindsightPlan plan;
  plan.nodes = search.nodes;
  plan.exact = !search.out_of_budget;
  if (search.improved) {
    plan.value = -static_cast<double>(search.best_cost);
    plan.actions = std::move(search.best_path);
  } else {
    plan.value = -static_cast<double>(greedy_cost);
    plan.actions = std::move(greedy_actions);
  }
  plan.bound = plan.exact ? plan.value : -static_cast<double>(root_bound);
  return plan;
}

HindsightPlan BinPackPlanner::operator()(const envs::BinPackEnv& env, int, const envs::BinPackState& pre,
                                         std::span<const int> suffix) const {
  return binpack_hindsight(pre.counts, suffix, env.capacity(), node_budget);
}

}  // namespace hindsight::planners
