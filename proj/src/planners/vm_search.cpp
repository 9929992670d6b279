#include "hindsight/planners/vm_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hindsight/core/errors.hpp"

namespace hindsight::planners {

using envs::ClusterState;
using envs::VmEvent;

bool vm_failures_impossible(const ClusterState& pre, int t, std::span<const VmEvent> suffix) {
  const auto E = suffix.size();
  for (std::size_t e = 0; e < E; ++e) {
    if (!suffix[e].request) continue;
    const auto& v = *suffix[e].request;
    const int event = t + static_cast<int>(e);
    long cores = 0;
    long memory = 0;
    for (const auto& pm : pre.pms) {
      for (const auto& h : pm.vms) {
        if (h.end_event > event) {
          cores += h.cores;
          memory += h.memory;
        }
      }
    }
    for (std::size_t k = 0; k < e; ++k) {
      const auto& w = suffix[k].request;
      if (w && w->end_event() > event) {
        cores += w->cores;
        memory += w->memory;
      }
    }
    int usable = 0;
    long min_cpu_room = std::numeric_limits<long>::max();
    long min_mem_room = std::numeric_limits<long>::max();
    for (const auto& pm : pre.pms) {
      const long cpu_room = pm.cpu_capacity - v.cores + 1;
      const long mem_room = pm.mem_capacity - v.memory + 1;
      if (cpu_room <= 0 || mem_room <= 0) continue;
      ++usable;
      min_cpu_room = std::min(min_cpu_room, cpu_room);
      min_mem_room = std::min(min_mem_room, mem_room);
    }
    if (usable == 0) return false;
    // Blocking PM p needs used_cores_p >= cpu_room_p or used_mem_p >= mem_room_p.
    const double blockable = static_cast<double>(cores) / static_cast<double>(min_cpu_room) +
                             static_cast<double>(memory) / static_cast<double>(min_mem_room);
    if (blockable >= usable) return false;
  }
  return true;
}

namespace {

struct Search {
  const envs::VmClusterEnv& env;
  int t;
  std::span<const VmEvent> suffix;
  long long budget;
  bool no_failures;

  std::size_t E = 0;
  std::vector<std::vector<long>> future{};  // future[k][e]: cores of requests in slots k..e active at e

  long long nodes = 0;
  bool out_of_budget = false;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Action> best_path{};
  std::vector<Action> path{};
  double open_bound = -std::numeric_limits<double>::infinity();

  void prepare() {
    E = suffix.size();
    future.assign(E + 1, std::vector<long>(E, 0));
    for (std::size_t k = 0; k <= E; ++k) {
      for (std::size_t e = k; e < E; ++e) {
        long c = 0;
        for (std::size_t j = k; j <= e; ++j) {
          const auto& r = suffix[j].request;
          if (r && r->end_event() > t + static_cast<int>(e)) c += r->cores;
        }
        future[k][e] = c;
      }
    }
  }

  /// Smallest total capacity of PMs from `free_caps_desc` covering z cores.
  static long cover(long z, const std::vector<int>& free_caps_desc) {
    if (z <= 0) return 0;
    long got = 0;
    for (int c : free_caps_desc) {
      got += c;
      if (got >= z) return got;
    }
    return got;  // cannot hold z at all; any larger value is still a bound
  }

  /// Upper bound on the rewards of events k..E-1 from the post-step state `s`.
  double future_bound(std::size_t k, const ClusterState& s) const {
    double total = 0.0;
    for (std::size_t e = k; e < E; ++e) {
      const int event = t + static_cast<int>(e);
      long fixed_used = 0;
      long fixed_cap = 0;
      std::vector<int> free_caps;
      for (const auto& pm : s.pms) {
        long used = 0;
        for (const auto& v : pm.vms) {
          if (v.end_event > event) used += v.cores;
        }
        if (used > 0) {
          fixed_used += used;
          fixed_cap += pm.cpu_capacity;
        } else {
          free_caps.push_back(pm.cpu_capacity);
        }
      }
      std::sort(free_caps.rbegin(), free_caps.rend());
      const long cmax = fixed_used + future[k][e];
      double inv_density = 1.0;
      if (cmax > 0) {
        auto ratio = [&](long u) {
          return static_cast<double>(fixed_cap + cover(u - fixed_cap, free_caps)) / static_cast<double>(u);
        };
        if (no_failures) {
          inv_density = std::max(1.0, ratio(cmax));
        } else if (fixed_used > 0) {
          // Used cores lie in [fixed_used, cmax]; the ratio is smallest at the
          // end of a constant-numerator stretch, so test those points.
          inv_density = ratio(cmax);
          long acc = fixed_cap;
          for (int c : free_caps) {
            if (acc >= fixed_used && acc <= cmax) inv_density = std::min(inv_density, ratio(std::max(acc, 1L)));
            acc += c;
          }
          if (acc >= fixed_used && acc <= cmax) inv_density = std::min(inv_density, ratio(acc));
          inv_density = std::max(inv_density, 1.0);
        }
      }
      total -= inv_density;
    }
    return total;
  }

  std::vector<Action> candidate_actions(const ClusterState& s) const {
    auto acts = env.actions(s);
    std::vector<Action> out;
    std::vector<std::pair<int, int>> seen_empty;
    for (Action a : acts) {
      if (a >= 0) {
        const auto& pm = s.pms[static_cast<std::size_t>(a)];
        if (!pm.utilized()) {
          const std::pair<int, int> cls{pm.cpu_capacity, pm.mem_capacity};
          if (std::find(seen_empty.begin(), seen_empty.end(), cls) != seen_empty.end()) continue;
          seen_empty.push_back(cls);
        }
      }
      out.push_back(a);
    }
    return out;
  }

  void run(std::size_t e, const ClusterState& pre, double acc) {
    if (e == E) {
      if (acc > best + 1e-12) {
        best = acc;
        best_path = path;
      }
      return;
    }
    const auto s = env.observe(pre, suffix[e]);
    struct Child {
      Action a;
      ClusterState next;
      double reward;
      double bound;
    };
    std::vector<Child> children;
    for (Action a : candidate_actions(s)) {
      auto tr = env.step(s, a, suffix[e]);
      const double b = acc + tr.reward + future_bound(e + 1, tr.next);
      children.push_back({a, std::move(tr.next), tr.reward, b});
    }
    std::stable_sort(children.begin(), children.end(), [](const Child& x, const Child& y) { return x.bound > y.bound; });
    for (auto& c : children) {
      if (c.bound <= best + 1e-12) continue;
      if (out_of_budget || ++nodes > budget) {
        out_of_budget = true;
        open_bound = std::max(open_bound, c.bound);
        continue;
      }
      path.push_back(c.a);
      run(e + 1, c.next, acc + c.reward);
      path.pop_back();
    }
  }
};

/// Best Fit over the suffix (min remaining cores, lowest index).
std::pair<double, std::vector<Action>> best_fit_plan(const envs::VmClusterEnv& env, const ClusterState& pre,
                                                     std::span<const VmEvent> suffix) {
  ClusterState state = pre;
  double total = 0.0;
  std::vector<Action> acts;
  for (const auto& ev : suffix) {
    const auto s = env.observe(state, ev);
    Action choice = kFailAction;
    int best_remaining = std::numeric_limits<int>::max();
    for (Action a : env.actions(s)) {
      if (a < 0) continue;
      const int rem = s.pms[static_cast<std::size_t>(a)].remaining_cores() - s.request->cores;
      if (rem < best_remaining) {
        best_remaining = rem;
        choice = a;
      }
    }
    auto tr = env.step(s, choice, ev);
    total += tr.reward;
    acts.push_back(choice);
    state = std::move(tr.next);
  }
  return {total, acts};
}

}  // namespace

HindsightPlan VmSearchPlanner::operator()(const envs::VmClusterEnv& env, int t, const ClusterState& pre,
                                          std::span<const VmEvent> suffix) const {
  Search search{env, t, suffix, node_budget, vm_failures_impossible(pre, t, suffix)};
  search.prepare();
  auto [bf_value, bf_actions] = best_fit_plan(env, pre, suffix);
  search.best = bf_value;
  search.best_path = bf_actions;
  search.run(0, pre, 0.0);

  HindsightPlan plan;
  plan.value = search.best;
  plan.actions = std::move(search.best_path);
  plan.nodes = search.nodes;
  plan.exact = !search.out_of_budget;
  plan.bound = plan.exact ? plan.value : std::max(plan.value, search.open_bound);
  return plan;
}

}  // namespace hindsight::planners
