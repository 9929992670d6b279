#pragma once

// Trace file schemas and synthetic generators.
//
//   bin packing / inventory: one integer per line (item size / demand).
//   VM: CSV with header "id,arrival_event,lifetime,cores,memory", one request
//       per line, 0-based arrival events, at most one request per event;
//       events without a line carry no request. The horizon is not stored in
//       the file and comes from the cluster config.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/envs/vm.hpp"

namespace hindsight::envs {

ExoTrace<int> read_int_trace(const std::filesystem::path& path);
void write_int_trace(const std::filesystem::path& path, const ExoTrace<int>& trace);

ExoTrace<VmEvent> read_vm_trace(const std::filesystem::path& path, int horizon);
void write_vm_trace(const std::filesystem::path& path, const ExoTrace<VmEvent>& trace);
std::string format_vm_trace(const ExoTrace<VmEvent>& trace);
ExoTrace<VmEvent> parse_vm_trace(const std::string& text, int horizon);

struct VmType {
  int cores = 1;
  int memory = 1;
  double weight = 1.0;
  /// Per-type lifetime distribution; empty means use the global one.
  std::vector<std::pair<int, double>> lifetime_dist;
};

struct VmGenConfig {
  int pm_count = 10;
  int cpu_capacity = 16;
  int mem_capacity = 64;
  double arrival_rate = 0.8;  // probability that an event carries a request
  std::vector<std::pair<int, double>> lifetime_dist{{1, 1.0}};
  std::vector<VmType> vm_type_table{{1, 2, 1.0, {}}};
  int horizon = 20;

  VmClusterConfig cluster() const { return {pm_count, cpu_capacity, mem_capacity, horizon}; }
};

/// Parses the generator config (JSON object with the fields above; each
/// lifetime_dist is a list of [lifetime, weight] pairs, vm_type_table a list
/// of {cores, memory, weight[, lifetime_dist]}).
VmGenConfig parse_vm_gen_config(const std::string& json_text);
VmGenConfig load_vm_gen_config(const std::filesystem::path& path);
std::string vm_gen_config_json(const VmGenConfig& config);

/// n traces; trace i uses seed derive_seed(seed, i).
std::vector<ExoTrace<VmEvent>> synth_vm_traces(const VmGenConfig& config, int n, std::uint64_t seed);

/// iid items with Pr(size = u) = probs[u-1].
ExoTrace<int> binpack_trace_sampler(const std::vector<double>& probs, int horizon, std::uint64_t seed);

/// iid demands with Pr(demand = d) = probs[d].
ExoTrace<int> inventory_trace_sampler(const std::vector<double>& probs, int horizon, std::uint64_t seed);

}  // namespace hindsight::envs
