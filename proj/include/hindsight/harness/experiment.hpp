#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hindsight/envs/traces.hpp"
#include "hindsight/envs/vm.hpp"
#include "hindsight/harness/evaluate.hpp"
#include "hindsight/heuristics/vm_heuristics.hpp"
#include "hindsight/learn/trainers.hpp"

namespace hindsight::harness {

/// One experiment on the VM allocation environment. JSON fields carry the
/// same names; "cluster" is a generator config and "train" a TrainConfig.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  envs::VmGenConfig cluster;
  int num_traces = 60;       // synthetic traces, used when trace_dir is empty
  std::string trace_dir;     // VM trace CSVs, read in file-name order
  double train_frac = 0.6;
  std::vector<std::string> algos{"best-fit"};
  learn::TrainConfig train;
  double min_reserved = 2.0; // Reserve heuristic
  long long eval_planner_budget = 200'000;
  long long label_planner_budget = 20'000;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Every field, defaults included.
std::string experiment_config_json(const ExperimentConfig& config);

/// Algorithms that train a network.
bool is_learned_algo(const std::string& algo);
/// Heuristic names, also accepted with a "heuristic:" prefix.
std::vector<std::string> heuristic_names();

/// Shape histogram of the requests in `traces` (offline Reserve profile).
heuristics::ReserveProfile reserve_profile_from(std::span<const ExoTrace<envs::VmEvent>> traces,
                                                double min_reserved);

struct TrainedPolicy {
  NamedPolicy named;
  std::optional<learn::TrainResult> result;  // learned algorithms only
  std::string detail;                        // e.g. the policy ERM selected
};

/// Builds the policy for `algo`: heuristics directly, the ERM pick over the
/// heuristic class, or a trained greedy network. `env` must outlive it.
TrainedPolicy make_vm_policy(const std::string& algo, const envs::VmClusterEnv& env,
                             std::span<const ExoTrace<envs::VmEvent>> train,
                             std::span<const ExoTrace<envs::VmEvent>> val, const ExperimentConfig& config);

/// Seed of an algorithm's training run: independent of list order.
std::uint64_t algo_seed(std::uint64_t seed, const std::string& algo);

struct ExperimentResult {
  EvalReport report;
  std::vector<TrainedPolicy> policies;
};

/// Generates or reads traces, splits them, trains every requested
/// algorithm, evaluates on the test split and writes report.csv,
/// report.json, curves/<algo>.csv, checkpoints/<algo>.mlp and manifest.json
/// into `out_dir`. On failure a PARTIAL file holding the error is left
/// behind and the error is rethrown.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// iteration,loss,train_return,val_return
std::string curve_csv(const std::vector<learn::CurvePoint>& curve);

std::vector<ExoTrace<envs::VmEvent>> load_vm_trace_dir(const std::filesystem::path& dir, int horizon);

}  // namespace hindsight::harness
