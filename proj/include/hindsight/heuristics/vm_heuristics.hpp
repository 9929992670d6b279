#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hindsight/core/policy.hpp"
#include "hindsight/core/rng.hpp"
#include "hindsight/envs/vm.hpp"

namespace hindsight::heuristics {

using envs::ClusterState;
using envs::VmRequest;

/// Feasible PM with the fewest remaining cores (lowest index on ties).
Action best_fit(const ClusterState& s);

/// Per-episode least-recently-used bookkeeping for round robin.
struct RoundRobinCursor {
  std::vector<long long> last_used;  // -1 = never chosen
  long long clock = 0;
};

/// Feasible PM chosen least recently (never-chosen first, lowest index on ties).
Action round_robin(const ClusterState& s, RoundRobinCursor& cursor);

/// Uniformly random feasible PM.
Action random_alloc(const ClusterState& s, CounterRng& rng);

/// Feasible PM minimising the population variance of per-PM VM counts after
/// placement (lowest index on ties).
Action balance_alloc(const ClusterState& s);

struct ReserveType {
  int cores = 1;
  int memory = 1;
  double weight = 0.0;
};

/// Demand histogram over VM shapes plus the reserve scale.
struct ReserveProfile {
  std::vector<ReserveType> types;
  double min_reserved = 1.0;
  bool online = false;

  /// Online mode: count one more request of this shape.
  void observe(const VmRequest& r);
  /// Weight of a shape (0 if absent).
  double weight_of(int cores, int memory) const;
};

/// How many more VMs of the given shape fit, counted greedily per PM.
long serviceable(const ClusterState& s, int cores, int memory);

/// One-step lookahead: keep PMs whose post-placement cluster still serves
/// at least min_reserved * (normalised weight) VMs of every demanded shape;
/// among those use Best Fit order; fall back to Best Fit when none qualifies.
Action reserve_alloc(const ClusterState& s, const ReserveProfile& profile);

/// Names accepted by make_heuristic: best-fit, round-robin, random, balance,
/// reserve, reserve-online.
PolicyPtr<ClusterState> make_heuristic(const std::string& name, ReserveProfile profile = {});

class BestFitPolicy final : public Policy<ClusterState> {
 public:
  Action act(const ClusterState& s, int, std::span<const Action>, CounterRng&) override { return best_fit(s); }
};

class RoundRobinPolicy final : public Policy<ClusterState> {
 public:
  void reset() override { cursor_ = {}; }
  Action act(const ClusterState& s, int, std::span<const Action>, CounterRng&) override {
    return round_robin(s, cursor_);
  }

 private:
  RoundRobinCursor cursor_;
};

class RandomAllocPolicy final : public Policy<ClusterState> {
 public:
  Action act(const ClusterState& s, int, std::span<const Action>, CounterRng& rng) override {
    return random_alloc(s, rng);
  }
  bool deterministic() const override { return false; }
};

class BalancePolicy final : public Policy<ClusterState> {
 public:
  Action act(const ClusterState& s, int, std::span<const Action>, CounterRng&) override { return balance_alloc(s); }
};

/// Offline profiles are fixed; online profiles start empty each episode and
/// learn only from requests already decided.
class ReservePolicy final : public Policy<ClusterState> {
 public:
  explicit ReservePolicy(ReserveProfile profile) : initial_(std::move(profile)), profile_(initial_) {}
  void reset() override { profile_ = initial_; }
  Action act(const ClusterState& s, int, std::span<const Action>, CounterRng&) override {
    const Action a = reserve_alloc(s, profile_);
    if (profile_.online && s.request) profile_.observe(*s.request);
    return a;
  }
  const ReserveProfile& profile() const { return profile_; }

 private:
  ReserveProfile initial_;
  ReserveProfile profile_;
};

}  // namespace hindsight::heuristics
