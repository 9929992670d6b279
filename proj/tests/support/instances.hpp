#pragma once

// Random desk-scale instances shared by the unit and acceptance suites.

#include <vector>

#include "hindsight/core/rng.hpp"
#include "hindsight/envs/vm.hpp"

namespace hindsight::testing {

struct VmInstance {
  envs::VmClusterEnv env{envs::VmClusterConfig{}};
  envs::ClusterState pre;  // cluster before observing event t
  int t = 1;
  std::vector<envs::VmEvent> suffix;
};

/// Cluster with up to `max_pms` PMs, some historical VMs and up to `max_vms`
/// requests over at most `max_events` events. Instances are redrawn until
/// every PM could host all VMs active at any event, so no placement can
/// ever fail.
inline VmInstance random_vm_instance(CounterRng& rng, int max_vms = 4, int max_pms = 3, int max_events = 6) {
  while (true) {
    VmInstance inst;
    const int pms = static_cast<int>(rng.uniform_int(2, max_pms));
    const int events = static_cast<int>(rng.uniform_int(2, max_events));
    const int cpu = static_cast<int>(rng.uniform_int(6, 10));
    const int mem = static_cast<int>(rng.uniform_int(6, 10));
    inst.t = static_cast<int>(rng.uniform_int(1, 3));
    inst.env = envs::VmClusterEnv({pms, cpu, mem, inst.t + events - 1});
    inst.pre = inst.env.initial_state();
    inst.pre.clock = inst.t - 1;
    const int hist = static_cast<int>(rng.uniform_int(0, 2));
    for (int h = 0; h < hist; ++h) {
      auto& pm = inst.pre.pms[static_cast<std::size_t>(rng.uniform_int(0, pms - 1))];
      const envs::PlacedVm v{100 + h, static_cast<int>(rng.uniform_int(1, 2)), static_cast<int>(rng.uniform_int(1, 2)),
                             inst.t + static_cast<int>(rng.uniform_int(1, events))};
      pm.vms.push_back(v);
      pm.used_cores += v.cores;
      pm.used_memory += v.memory;
    }
    inst.suffix.assign(static_cast<std::size_t>(events), {});
    const int vms = static_cast<int>(rng.uniform_int(1, max_vms));
    int id = 0;
    for (int k = 0; k < vms; ++k) {
      const int slot = static_cast<int>(rng.uniform_int(0, events - 1));
      auto& ev = inst.suffix[static_cast<std::size_t>(slot)];
      if (ev.request) continue;
      ev.request = envs::VmRequest{id++, inst.t + slot, static_cast<int>(rng.uniform_int(1, 4)),
                                   static_cast<int>(rng.uniform_int(1, 3)), static_cast<int>(rng.uniform_int(1, 3))};
    }
    bool roomy = true;
    for (int e = 0; e < events && roomy; ++e) {
      const int event = inst.t + e;
      int cores = 0, memory = 0;
      for (const auto& ev : inst.suffix) {
        if (ev.request && ev.request->arrival_event <= event && ev.request->end_event() > event) {
          cores += ev.request->cores;
          memory += ev.request->memory;
        }
      }
      for (const auto& pm : inst.pre.pms) {
        int hc = 0, hm = 0;
        for (const auto& v : pm.vms) {
          if (v.end_event > event) {
            hc += v.cores;
            hm += v.memory;
          }
        }
        if (hc + cores > pm.cpu_capacity || hm + memory > pm.mem_capacity) roomy = false;
      }
    }
    if (roomy) return inst;
  }
}

}  // namespace hindsight::testing
