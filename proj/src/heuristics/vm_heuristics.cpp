#include "hindsight/heuristics/vm_heuristics.hpp"

#include <algorithm>
#include <limits>

#include "hindsight/core/errors.hpp"

namespace hindsight::heuristics {

namespace {

std::vector<Action> feasible_pms(const ClusterState& s) {
  std::vector<Action> out;
  if (!s.request) return out;
  for (std::size_t p = 0; p < s.pms.size(); ++p) {
    if (s.pms[p].fits(*s.request)) out.push_back(static_cast<Action>(p));
  }
  return out;
}

Action best_fit_among(const ClusterState& s, const std::vector<Action>& candidates) {
  Action pick = kFailAction;
  int best = std::numeric_limits<int>::max();
  for (Action a : candidates) {
    const int rem = s.pms[static_cast<std::size_t>(a)].remaining_cores();
    if (rem < best) {
      best = rem;
      pick = a;
    }
  }
  return pick;
}

}  // namespace

Action best_fit(const ClusterState& s) { return best_fit_among(s, feasible_pms(s)); }

Action round_robin(const ClusterState& s, RoundRobinCursor& cursor) {
  if (cursor.last_used.size() != s.pms.size()) cursor.last_used.assign(s.pms.size(), -1);
  Action pick = kFailAction;
  for (Action a : feasible_pms(s)) {
    if (pick == kFailAction || cursor.last_used[static_cast<std::size_t>(a)] <
                                   cursor.last_used[static_cast<std::size_t>(pick)]) {
      pick = a;
    }
  }
  if (pick != kFailAction) cursor.last_used[static_cast<std::size_t>(pick)] = cursor.clock++;
  return pick;
}

Action random_alloc(const ClusterState& s, CounterRng& rng) {
  const auto f = feasible_pms(s);
  if (f.empty()) return kFailAction;
  return f[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(f.size()) - 1))];
}

Action balance_alloc(const ClusterState& s) {
  Action pick = kFailAction;
  double best = std::numeric_limits<double>::infinity();
  const auto n = static_cast<double>(s.pms.size());
  for (Action a : feasible_pms(s)) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t p = 0; p < s.pms.size(); ++p) {
      const double c = static_cast<double>(s.pms[p].vms.size()) + (static_cast<Action>(p) == a ? 1.0 : 0.0);
      sum += c;
      sq += c * c;
    }
    const double var = sq / n - (sum / n) * (sum / n);
    if (var < best - 1e-12) {
      best = var;
      pick = a;
    }
  }
  return pick;
}

void ReserveProfile::observe(const VmRequest& r) {
  for (auto& t : types) {
    if (t.cores == r.cores && t.memory == r.memory) {
      t.weight += 1.0;
      return;
    }
  }
  types.push_back({r.cores, r.memory, 1.0});
}

double ReserveProfile::weight_of(int cores, int memory) const {
  for (const auto& t : types) {
    if (t.cores == cores && t.memory == memory) return t.weight;
  }
  return 0.0;
}

long serviceable(const ClusterState& s, int cores, int memory) {
  long n = 0;
  for (const auto& pm : s.pms) {
    const int free_c = pm.cpu_capacity - pm.used_cores;
    const int free_m = pm.mem_capacity - pm.used_memory;
    n += std::min(free_c / cores, free_m / memory);
  }
  return n;
}

Action reserve_alloc(const ClusterState& s, const ReserveProfile& profile) {
  const auto f = feasible_pms(s);
  if (f.empty()) return kFailAction;
  double total = 0.0;
  for (const auto& t : profile.types) total += std::max(0.0, t.weight);
  if (total <= 0.0) return best_fit_among(s, f);
  std::vector<Action> keep;
  for (Action a : f) {
    ClusterState post = s;
    auto& pm = post.pms[static_cast<std::size_t>(a)];
    pm.used_cores += s.request->cores;
    pm.used_memory += s.request->memory;
    bool ok = true;
    for (const auto& t : profile.types) {
      if (t.weight <= 0.0) continue;
      const double need = profile.min_reserved * t.weight / total;
      if (static_cast<double>(serviceable(post, t.cores, t.memory)) < need) ok = false;
    }
    if (ok) keep.push_back(a);
  }
  return best_fit_among(s, keep.empty() ? f : keep);
}

PolicyPtr<ClusterState> make_heuristic(const std::string& name, ReserveProfile profile) {
  if (name == "best-fit") return std::make_shared<BestFitPolicy>();
  if (name == "round-robin") return std::make_shared<RoundRobinPolicy>();
  if (name == "random") return std::make_shared<RandomAllocPolicy>();
  if (name == "balance") return std::make_shared<BalancePolicy>();
  if (name == "reserve") {
    profile.online = false;
    return std::make_shared<ReservePolicy>(std::move(profile));
  }
  if (name == "reserve-online") {
    profile.online = true;
    profile.types.clear();
    return std::make_shared<ReservePolicy>(std::move(profile));
  }
  throw ConfigError("unknown heuristic '" + name + "'");
}

}  // namespace hindsight::heuristics
