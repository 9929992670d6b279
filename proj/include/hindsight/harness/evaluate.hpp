#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hindsight/core/policy.hpp"
#include "hindsight/envs/vm.hpp"
#include "hindsight/planners/vm_search.hpp"

namespace hindsight::harness {

struct NamedPolicy {
  std::string name;
  PolicyPtr<envs::ClusterState> policy;
};

/// Return and time-averaged utilized PMs of one episode.
struct EpisodeStats {
  double total_return = 0.0;
  double pms_used = 0.0;
};

EpisodeStats play_vm(const envs::VmClusterEnv& env, Policy<envs::ClusterState>& policy,
                     const ExoTrace<envs::VmEvent>& trace, std::uint64_t seed);

struct PolicyRow {
  std::string name;
  std::vector<double> returns;    // per test trace
  std::vector<double> pms_used;   // time-average utilized PMs per trace
  std::vector<double> pms_saved;  // Best Fit's pms_used minus this row's, per trace
  double mean_return = 0.0;
  double ci95 = 0.0;
  double pms_saved_mean = 0.0;
  double p_vs_bestfit = 1.0;      // Welch's test on per-trace PMs used
  std::optional<double> headroom; // absent when the bound does not beat Best Fit
};

inline constexpr const char* kBestFitRow = "best-fit";
inline constexpr const char* kBoundRow = "hindsight-bound";

/// Rows: Best Fit first, then each requested policy not named "best-fit",
/// then the hindsight bound (per-trace planner bound from s_1; its PMs come
/// from replaying the planner's actions).
struct EvalReport {
  std::vector<PolicyRow> rows;
  std::vector<bool> bound_exact;
  int dominance_violations = 0;  // policy return above the bound on some trace

  const PolicyRow& row(const std::string& name) const;
};

/// Trace i of every policy is played with seed derive_seed(seed, i).
/// Planner calls run on `workers` threads; results do not depend on it.
EvalReport evaluate(const envs::VmClusterEnv& env, const std::vector<NamedPolicy>& policies,
                    std::span<const ExoTrace<envs::VmEvent>> test, const planners::VmSearchPlanner& planner,
                    std::uint64_t seed, int workers = 1);

/// (policy mean - Best Fit mean) / (bound mean - Best Fit mean) over returns,
/// absent when the denominator is not positive.
std::optional<double> headroom_capture(const EvalReport& report, const std::string& policy);

/// "%.9g"
std::string fmt9(double x);

/// policy,mean_return,ci95,pms_saved,p_vs_bestfit,headroom
std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);

}  // namespace hindsight::harness
