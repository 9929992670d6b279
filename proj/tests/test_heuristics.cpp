#include <doctest.h>

#include <cmath>

#include "hindsight/core/rollout.hpp"
#include "hindsight/envs/traces.hpp"
#include "hindsight/envs/vm.hpp"
#include "hindsight/heuristics/vm_heuristics.hpp"

using namespace hindsight;
using namespace hindsight::envs;
using namespace hindsight::heuristics;

namespace {

ClusterState cluster(std::vector<int> caps, std::vector<int> used_cores, VmRequest req, std::vector<int> vm_counts = {}) {
  ClusterState s;
  for (std::size_t p = 0; p < caps.size(); ++p) {
    PmState pm;
    pm.cpu_capacity = caps[p];
    pm.mem_capacity = 100;
    pm.used_cores = used_cores[p];
    const int n = vm_counts.empty() ? (used_cores[p] > 0 ? 1 : 0) : vm_counts[p];
    int left = used_cores[p];
    for (int k = 0; k < n; ++k) {
      const int c = k + 1 == n ? left : 1;
      pm.vms.push_back({100 + k, c, 0, 99});
      left -= c;
    }
    s.pms.push_back(pm);
  }
  s.request = req;
  return s;
}

VmRequest req(int cores, int memory = 1) { return {0, 1, 3, cores, memory}; }

}  // namespace

TEST_CASE("best fit") {
  CHECK(best_fit(cluster({4, 8}, {2, 3}, req(2))) == 0);  // remaining (2, 5)
  CHECK(best_fit(cluster({4, 4}, {4, 4}, req(1))) == kFailAction);
  CHECK(best_fit(cluster({4, 4}, {4, 1}, req(2))) == 1);
  CHECK(best_fit(cluster({4, 4}, {1, 1}, req(2))) == 0);
}

TEST_CASE("round robin") {
  RoundRobinCursor cur;
  const auto s = cluster({4, 4, 4}, {0, 0, 0}, req(1));
  CHECK(round_robin(s, cur) == 0);
  CHECK(round_robin(s, cur) == 1);
  CHECK(round_robin(s, cur) == 2);
  CHECK(round_robin(s, cur) == 0);
  CHECK(round_robin(cluster({4, 4}, {4, 4}, req(1)), cur) == kFailAction);
  RoundRobinCursor one;
  for (int i = 0; i < 3; ++i) CHECK(round_robin(cluster({4}, {0}, req(1)), one) == 0);
}

TEST_CASE("random allocation") {
  const auto s = cluster({4, 4, 4, 4}, {0, 0, 4, 0}, req(1));
  CounterRng a(3), b(3);
  for (int i = 0; i < 50; ++i) CHECK(random_alloc(s, a) == random_alloc(s, b));
  CHECK(random_alloc(cluster({4}, {4}, req(1)), a) == kFailAction);
  // Uniform over the three feasible PMs, within 3 sigma per bucket.
  std::vector<int> counts(4, 0);
  CounterRng rng(10);
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(random_alloc(s, rng))];
  CHECK(counts[2] == 0);
  const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (int p : {0, 1, 3}) CHECK(std::abs(counts[static_cast<std::size_t>(p)] - n / 3.0) <= 3 * sigma);
}

TEST_CASE("balance") {
  CHECK(balance_alloc(cluster({8, 8}, {0, 2}, req(1), {0, 2})) == 0);
  CHECK(balance_alloc(cluster({8, 8}, {1, 1}, req(1), {1, 1})) == 0);
  CHECK(balance_alloc(cluster({8}, {3}, req(1), {3})) == 0);
}

TEST_CASE("reserve") {
  SUBCASE("empty histogram is Best Fit") {
    const auto s = cluster({4, 8}, {2, 3}, req(2));
    CHECK(reserve_alloc(s, {}) == best_fit(s));
  }
  SUBCASE("keeps a slot for the demanded shape") {
    // Demand is for 3-core VMs. Best Fit would put the 1-core request on
    // PM0 (3 free) and leave room for one 3-core VM; PM1 keeps two.
    const auto s = cluster({4, 4}, {1, 0}, req(1));
    CHECK(best_fit(s) == 0);
    ReserveProfile prof{{{3, 1, 1.0}}, 2.0, false};
    CHECK(reserve_alloc(s, prof) == 1);
    prof.min_reserved = 1.0;
    CHECK(reserve_alloc(s, prof) == 0);
  }
  SUBCASE("online histogram counts what it has seen") {
    ReserveProfile prof;
    prof.online = true;
    prof.observe(req(2, 2));
    prof.observe(req(2, 2));
    prof.observe(req(4, 1));
    CHECK(prof.weight_of(2, 2) == 2.0);
    CHECK(prof.weight_of(4, 1) == 1.0);
    CHECK(prof.types.size() == 2);
  }
}

TEST_CASE("every heuristic returns a feasible PM whenever one exists") {
  VmGenConfig cfg;
  cfg.pm_count = 4;
  cfg.cpu_capacity = 8;
  cfg.mem_capacity = 16;
  cfg.arrival_rate = 0.95;
  cfg.horizon = 40;
  cfg.lifetime_dist = {{3, 1.0}, {8, 1.0}};
  cfg.vm_type_table = {{1, 2, 1.0, {}}, {2, 4, 1.0, {}}, {4, 8, 1.0, {}}};
  const VmClusterEnv env(cfg.cluster());
  ReserveProfile prof{{{4, 8, 1.0}, {1, 2, 3.0}}, 3.0, false};
  for (const std::string name : {"best-fit", "round-robin", "random", "balance", "reserve", "reserve-online"}) {
    auto pol = make_heuristic(name, prof);
    for (const auto& tr : synth_vm_traces(cfg, 5, 4)) {
      const auto traj = rollout(env, *pol, tr, 1);  // rollout throws on infeasible choices
      for (const auto& st : traj.steps) {
        const bool any = st.state.request && best_fit(st.state) != kFailAction;
        CHECK((st.action != kFailAction) == any);
      }
    }
  }
  CHECK_THROWS_AS(make_heuristic("first-fit"), ConfigError);
}
