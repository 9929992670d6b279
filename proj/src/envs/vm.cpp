#include "hindsight/envs/vm.hpp"

#include <algorithm>
#include <cmath>

#include "hindsight/core/errors.hpp"

namespace hindsight::envs {

double packing_density(const ClusterState& state) {
  long used = 0;
  long capacity = 0;
  for (const auto& pm : state.pms) {
    if (!pm.utilized()) continue;
    used += pm.used_cores;
    capacity += pm.cpu_capacity;
  }
  if (capacity == 0) return 1.0;
  return static_cast<double>(used) / static_cast<double>(capacity);
}

int utilized_pms(const ClusterState& state) {
  return static_cast<int>(std::count_if(state.pms.begin(), state.pms.end(), [](const PmState& pm) { return pm.utilized(); }));
}

namespace {

void record_utilization(ClusterState& state) {
  for (auto& pm : state.pms) {
    pm.util_history[2] = pm.util_history[1];
    pm.util_history[1] = pm.util_history[0];
    pm.util_history[0] = pm.cpu_capacity > 0 ? static_cast<double>(pm.used_cores) / pm.cpu_capacity : 0.0;
  }
}

}  // namespace

VmStep vm_step(const ClusterState& state, Action action) {
  VmStep out{state, 0.0, false};
  auto& next = out.next;
  if (next.request) {
    const VmRequest req = *next.request;
    const bool in_range = action >= 0 && action < static_cast<int>(next.pms.size());
    if (in_range && next.pms[static_cast<std::size_t>(action)].fits(req)) {
      auto& pm = next.pms[static_cast<std::size_t>(action)];
      pm.used_cores += req.cores;
      pm.used_memory += req.memory;
      pm.vms.push_back({req.id, req.cores, req.memory, req.end_event()});
    } else {
      out.failed = true;
      next.failed += 1;
    }
    next.request.reset();
  }
  record_utilization(next);
  out.reward = (out.failed ? VmClusterEnv::kFailPenalty : 0.0) - 1.0 / packing_density(next);
  return out;
}

ClusterState vm_observe(const ClusterState& state, int event, const VmEvent& ev) {
  ClusterState out = state;
  out.clock = event;
  for (auto& pm : out.pms) {
    auto gone = std::stable_partition(pm.vms.begin(), pm.vms.end(), [&](const PlacedVm& v) { return v.end_event > event; });
    for (auto it = gone; it != pm.vms.end(); ++it) {
      pm.used_cores -= it->cores;
      pm.used_memory -= it->memory;
    }
    pm.vms.erase(gone, pm.vms.end());
  }
  out.request = ev.request;
  return out;
}

VmClusterEnv::VmClusterEnv(VmClusterConfig config) : config_(config) {
  if (config_.pm_count < 1) throw ConfigError("pm_count must be >= 1");
  if (config_.cpu_capacity < 1 || config_.mem_capacity < 1) throw ConfigError("PM capacities must be >= 1");
  if (config_.horizon < 0) throw ConfigError("horizon must be >= 0");
}

ClusterState VmClusterEnv::initial_state() const {
  ClusterState s;
  PmState pm;
  pm.cpu_capacity = config_.cpu_capacity;
  pm.mem_capacity = config_.mem_capacity;
  s.pms.assign(static_cast<std::size_t>(config_.pm_count), pm);
  return s;
}

std::vector<Action> VmClusterEnv::actions(const State& s) const {
  std::vector<Action> acts;
  if (s.request) {
    for (std::size_t p = 0; p < s.pms.size(); ++p) {
      if (s.pms[p].fits(*s.request)) acts.push_back(static_cast<Action>(p));
    }
  }
  if (acts.empty()) acts.push_back(kFailAction);
  return acts;
}

Transition<ClusterState> VmClusterEnv::step(const State& s, Action a, const Input&) const {
  auto r = vm_step(s, a);
  return {std::move(r.next), r.reward};
}

RewardRange VmClusterEnv::reward_range() const {
  const double worst_inverse_density = static_cast<double>(config_.pm_count) * config_.cpu_capacity;
  return {kFailPenalty - worst_inverse_density, -1.0};
}

std::string VmClusterEnv::state_key(const State& s) const {
  std::string key = std::to_string(s.clock) + "|";
  for (const auto& pm : s.pms) {
    std::vector<PlacedVm> vms = pm.vms;
    std::sort(vms.begin(), vms.end(), [](const PlacedVm& a, const PlacedVm& b) { return a.id < b.id; });
    for (const auto& v : vms) key += std::to_string(v.id) + ",";
    key += ";";
  }
  if (s.request) key += "r" + std::to_string(s.request->id);
  return key;
}

namespace {

int max_end(const PmState& pm) {
  int end = 0;
  for (const auto& v : pm.vms) end = std::max(end, v.end_event);
  return end;
}

}  // namespace

std::vector<double> VmClusterEnv::features(const State& s, Action a, int) const {
  std::vector<double> phi(static_cast<std::size_t>(kFeatureDim), 0.0);
  const double cpu = config_.cpu_capacity;
  const double mem = config_.mem_capacity;
  const double horizon = config_.horizon > 0 ? config_.horizon : 1.0;
  if (s.request) {
    phi[0] = s.request->cores / cpu;
    phi[1] = s.request->memory / mem;
    phi[2] = s.request->lifetime / horizon;
  }
  const double density_before = packing_density(s);
  phi[15] = density_before;
  phi[19] = 1.0;
  if (a == kFailAction || !s.request || a < 0 || a >= static_cast<int>(s.pms.size())) {
    phi[16] = density_before;
    phi[17] = utilized_pms(s) / static_cast<double>(s.pms.size());
    phi[18] = 1.0;
    return phi;
  }
  const auto& pm = s.pms[static_cast<std::size_t>(a)];
  const auto& req = *s.request;
  phi[3] = pm.cpu_capacity / cpu;
  phi[4] = pm.mem_capacity / mem;
  phi[5] = pm.used_cores / static_cast<double>(pm.cpu_capacity);
  phi[6] = pm.used_memory / static_cast<double>(pm.mem_capacity);
  phi[7] = pm.util_history[0];
  phi[8] = pm.util_history[1];
  phi[9] = pm.util_history[2];
  phi[10] = (pm.used_cores + req.cores) / static_cast<double>(pm.cpu_capacity);
  phi[11] = (pm.used_memory + req.memory) / static_cast<double>(pm.mem_capacity);
  phi[12] = pm.utilized() ? 1.0 : 0.0;
  const int pm_end = max_end(pm);
  phi[13] = pm.utilized() ? (pm_end - s.clock) / horizon : 0.0;
  phi[14] = pm.utilized() ? std::abs(req.end_event() - pm_end) / horizon : req.lifetime / horizon;
  long used = req.cores;
  long capacity = 0;
  int utilized = 0;
  for (std::size_t p = 0; p < s.pms.size(); ++p) {
    const auto& q = s.pms[p];
    const bool on = q.utilized() || static_cast<int>(p) == a;
    if (!on) continue;
    used += q.used_cores;
    capacity += q.cpu_capacity;
    ++utilized;
  }
  phi[16] = capacity > 0 ? static_cast<double>(used) / static_cast<double>(capacity) : 1.0;
  phi[17] = utilized / static_cast<double>(s.pms.size());
  return phi;
}

}  // namespace hindsight::envs
