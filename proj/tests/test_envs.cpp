#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "hindsight/core/policy.hpp"
#include "hindsight/core/rollout.hpp"
#include "hindsight/envs/binpack.hpp"
#include "hindsight/envs/inventory.hpp"
#include "hindsight/envs/pandora.hpp"
#include "hindsight/envs/tabular.hpp"
#include "hindsight/envs/traces.hpp"
#include "hindsight/envs/vm.hpp"

using namespace hindsight;
using namespace hindsight::envs;

namespace {

ClusterState two_pm_cluster() {
  const VmClusterEnv env({2, 4, 16, 5});
  auto s = env.initial_state();
  s.pms[0].used_cores = 2;
  s.pms[0].used_memory = 2;
  s.pms[0].vms.push_back({0, 2, 2, 10});
  s.clock = 1;
  s.request = VmRequest{1, 2, 3, 2, 2};
  return s;
}

std::filesystem::path temp_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("binpack_step reward table") {
  SUBCASE("open a bin at the item's size") {
    const auto r = binpack_step({{0, 0, 0}, 2}, 0, 3);
    CHECK(r.next.counts == std::vector<int>{0, 1, 0});
    CHECK(r.reward == -1.0);
  }
  SUBCASE("feasible move") {
    const auto r = binpack_step({{1, 0, 0}, 2}, 1, 3);
    CHECK(r.next.counts == std::vector<int>{0, 0, 1});
    CHECK(r.reward == 0.0);
  }
  SUBCASE("infeasible action is penalised and leaves occupancy alone") {
    for (int item = 1; item <= 3; ++item) {
      const auto r = binpack_step({{0, 0, 1}, item}, 3, 3);
      CHECK(r.reward == -100.0);
      CHECK(r.next.counts == std::vector<int>{0, 0, 1});
    }
  }
}

TEST_CASE("bin packing conservation: mass grows by the item on feasible steps") {
  const BinPackEnv env(4, 30);
  CounterRng rng(8);
  UniformPolicy<BinPackState> policy;
  std::vector<int> items;
  for (int i = 0; i < 30; ++i) items.push_back(static_cast<int>(rng.uniform_int(1, 4)));
  const auto traj = rollout(env, policy, ExoTrace<int>(items), 4);
  for (const auto& st : traj.steps) {
    CHECK(BinPackEnv::mass(st.next) == BinPackEnv::mass(st.state) + st.input);
    for (int c : st.next.counts) CHECK(c >= 0);
  }
}

TEST_CASE("inventory_step examples") {
  InventoryParams p{0, 1.0, 1.0, 10, 1};
  CHECK(inventory_step({0, {}}, 1, 1, p).reward == 0.0);

  p = {1, 1.0, 2.0, 10, 1};
  CHECK(inventory_step({2, {0}}, 0, 5, p).reward == -6.0);

  p = {1, 1.0, 1.0, 10, 1};
  const auto r = inventory_step({3, {1}}, 0, 1, p);
  CHECK(r.reward == -3.0);
  CHECK(r.next.on_hand == 3);
}

TEST_CASE("inventory balance and pipeline shift") {
  const InventoryParams p{2, 1.0, 3.0, 6, 25};
  const InventoryEnv env(p);
  UniformPolicy<InventoryState> policy;
  const auto demands = inventory_trace_sampler({0.2, 0.2, 0.2, 0.2, 0.2}, 25, 7);
  const auto traj = rollout(env, policy, demands, 3);
  for (const auto& st : traj.steps) {
    const int level = st.state.on_hand + st.state.pipeline.front();
    CHECK(st.next.on_hand == std::max(level - st.input, 0));
    CHECK(st.next.pipeline.back() == st.action);
    CHECK(st.next.pipeline[0] == st.state.pipeline[1]);
  }
}

TEST_CASE("inventory rejects out-of-range orders") {
  const InventoryParams p{0, 1.0, 1.0, 3, 1};
  CHECK_THROWS_AS(inventory_step({0, {}}, 4, 1, p), InvalidAction);
}

TEST_CASE("vm_step: density-based reward") {
  SUBCASE("co-locate on the loaded PM") {
    const auto r = vm_step(two_pm_cluster(), 0);
    CHECK(packing_density(r.next) == 1.0);
    CHECK(r.reward == -1.0);
    CHECK_FALSE(r.failed);
  }
  SUBCASE("spread to the empty PM") {
    const auto r = vm_step(two_pm_cluster(), 1);
    CHECK(packing_density(r.next) == 0.5);
    CHECK(r.reward == -2.0);
  }
  SUBCASE("FAIL on an empty cluster") {
    const VmClusterEnv env({2, 4, 16, 5});
    auto s = env.initial_state();
    s.request = VmRequest{0, 1, 1, 1, 1};
    const auto r = vm_step(s, kFailAction);
    CHECK(r.failed);
    CHECK(r.reward == -100.0 - 1.0);
  }
  SUBCASE("placing on a PM without room fails and drops the request") {
    auto s = two_pm_cluster();
    s.request = VmRequest{1, 2, 3, 3, 1};
    const auto r = vm_step(s, 0);
    CHECK(r.failed);
    CHECK(r.next.pms[0].vms.size() == 1);
    CHECK(r.reward == -100.0 - 1.0 / 0.5);
  }
}

TEST_CASE("packing_density examples") {
  const VmClusterEnv env({2, 4, 16, 5});
  auto s = env.initial_state();
  CHECK(packing_density(s) == 1.0);

  ClusterState one;
  PmState pm;
  pm.cpu_capacity = 8;
  pm.mem_capacity = 8;
  pm.used_cores = 6;
  pm.vms.push_back({0, 6, 1, 9});
  one.pms.push_back(pm);
  CHECK(packing_density(one) == 0.75);

  s.pms[0].used_cores = 4;
  s.pms[0].vms.push_back({0, 4, 1, 9});
  CHECK(packing_density(s) == 1.0);
}

TEST_CASE("vm observe expires finished VMs before the request") {
  const VmClusterEnv env({1, 4, 4, 6});
  auto s = env.initial_state();
  const VmEvent first{VmRequest{0, 1, 2, 2, 2}};
  s = env.observe(s, first);
  s = env.step(s, 0, first).next;
  s = env.observe(s, VmEvent{});
  CHECK(s.pms[0].used_cores == 2);  // active on events 1..2
  s = env.step(s, kFailAction, VmEvent{}).next;
  s = env.observe(s, VmEvent{});
  CHECK(s.pms[0].used_cores == 0);
  CHECK(s.pms[0].vms.empty());
}

TEST_CASE("cluster capacity holds under random placements") {
  VmGenConfig cfg;
  cfg.pm_count = 4;
  cfg.cpu_capacity = 8;
  cfg.mem_capacity = 16;
  cfg.arrival_rate = 0.9;
  cfg.horizon = 40;
  cfg.lifetime_dist = {{2, 1.0}, {5, 1.0}, {9, 1.0}};
  cfg.vm_type_table = {{1, 2, 1.0, {}}, {2, 4, 1.0, {}}, {4, 8, 1.0, {}}};
  const VmClusterEnv env(cfg.cluster());
  UniformPolicy<ClusterState> policy;
  for (const auto& trace : synth_vm_traces(cfg, 5, 17)) {
    const auto traj = rollout(env, policy, trace, 2);
    for (const auto& st : traj.steps) {
      for (const auto& pm : st.next.pms) {
        CHECK(pm.used_cores <= pm.cpu_capacity);
        CHECK(pm.used_memory <= pm.mem_capacity);
        int cores = 0;
        for (const auto& v : pm.vms) {
          CHECK(v.end_event > st.t);
          cores += v.cores;
        }
        CHECK(cores == pm.used_cores);
      }
    }
  }
}

TEST_CASE("vm actions are feasible PMs or FAIL") {
  auto s = two_pm_cluster();
  const VmClusterEnv env({2, 4, 16, 5});
  CHECK(env.actions(s) == std::vector<Action>{0, 1});
  s.request = VmRequest{1, 2, 1, 4, 1};
  CHECK(env.actions(s) == std::vector<Action>{1});
  s.request.reset();
  CHECK(env.actions(s) == std::vector<Action>{kFailAction});
  CHECK(env.features(s, kFailAction, 1).size() == static_cast<std::size_t>(env.feature_dim()));
}

TEST_CASE("pandora dynamics table") {
  const auto env = pandora_env();
  const auto accept = env.step({0}, 1, 0.37);
  CHECK(accept.reward == 0.37);
  CHECK(accept.next.accepted == 1);
  for (int a = 0; a <= 1; ++a) {
    const auto r = env.step({1}, a, 0.9);
    CHECK(r.reward == 0.0);
    CHECK(r.next.accepted == 1);
  }
  CHECK(env.step({0}, 0, 0.8).next.accepted == 0);
}

TEST_CASE("pandora closed forms") {
  const auto env = pandora_env();
  CHECK(expected_max_of_uniforms({0.9, 0.9}) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(expected_max_of_uniforms({1.0}) == doctest::Approx(0.5));
  CHECK(expected_max_of_uniforms({}) == 0.0);
  // E max(U[0,1], U[0,2]) = integral_0^2 (1 - F1 F2) = 2 - (1/6 + 3/4) = 13/12.
  CHECK(expected_max_of_uniforms({1.0, 2.0}) == doctest::Approx(13.0 / 12.0).epsilon(1e-12));
  CHECK(std::abs(env.q_dagger_exact(1, {0}, 0) - 0.6) <= 1e-9);
  CHECK(std::abs(env.q_dagger_exact(1, {0}, 1) - 0.5) <= 1e-9);
  CHECK(std::abs(env.q_star_exact(1, {0}, 0) - 0.45) <= 1e-9);
  CHECK(std::abs(env.q_star_exact(1, {0}, 1) - 0.5) <= 1e-9);
  CHECK(std::abs(env.v_star_exact(1, {0}) - 0.5) <= 1e-9);
}

TEST_CASE("pandora Monte Carlo: E max(xi2, xi3) and max of means") {
  const auto env = pandora_env();
  CounterRng rng(2024);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto xs = env.sample_trace(rng);
    const double m = std::max(xs[1], xs[2]);
    sum += m;
    sum_sq += m * m;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - 0.6) <= 3.0 * se);
  CHECK(std::max(env.mean_input(2), env.mean_input(3)) == doctest::Approx(0.45));
}

TEST_CASE("tabular env carries the observed prefix") {
  CounterRng rng(3);
  const auto env = random_tabular_env(rng, 3, 2, 2, 3);
  auto s = env.initial_state();
  s = env.step(s, 1, 0).next;
  s = env.step(s, 0, 1).next;
  CHECK(s.prefix == std::vector<int>{0, 1});
  const auto dist = iid_trace_distribution({0.25, 0.75}, 3);
  double total = 0.0;
  for (const auto& e : dist) total += e.second;
  CHECK(dist.size() == 8);
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("uniform_over merges duplicates") {
  const std::vector<ExoTrace<int>> data{ExoTrace<int>({1, 2}), ExoTrace<int>({1, 2}), ExoTrace<int>({2, 2})};
  const auto d = uniform_over(data);
  REQUIRE(d.size() == 2);
  CHECK(d[0].second == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(uniform_over(std::vector<ExoTrace<int>>{}), EmptyDataset);
}

TEST_CASE("generators are deterministic") {
  VmGenConfig cfg;
  cfg.horizon = 30;
  const auto a = synth_vm_traces(cfg, 3, 5);
  const auto b = synth_vm_traces(cfg, 3, 5);
  CHECK(a == b);
  CHECK(format_vm_trace(a[0]) == format_vm_trace(b[0]));
  CHECK(synth_vm_traces(cfg, 3, 6) != a);
  CHECK(binpack_trace_sampler({0.5, 0.5}, 20, 1) == binpack_trace_sampler({0.5, 0.5}, 20, 1));
}

TEST_CASE("VM generator with arrival rate 0 gives empty traces") {
  VmGenConfig cfg;
  cfg.arrival_rate = 0.0;
  for (const auto& tr : synth_vm_traces(cfg, 4, 1)) {
    for (const auto& ev : tr.inputs()) CHECK_FALSE(ev.request.has_value());
    CHECK(format_vm_trace(tr) == "id,arrival_event,lifetime,cores,memory\n");
  }
}

TEST_CASE("iid item sampler frequencies within 3 sigma of uniform") {
  const int n = 10000;
  const auto tr = binpack_trace_sampler({1.0 / 3, 1.0 / 3, 1.0 / 3}, n, 77);
  std::vector<int> counts(3, 0);
  for (int v : tr.inputs()) counts[static_cast<std::size_t>(v - 1)]++;
  const double p = 1.0 / 3.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) <= 3.0 * sigma);
}

TEST_CASE("trace files round-trip") {
  const auto dir = temp_dir("hindsight_trace_test");
  const ExoTrace<int> items({3, 1, 2, 2});
  write_int_trace(dir / "items.txt", items);
  CHECK(read_int_trace(dir / "items.txt") == items);

  VmGenConfig cfg;
  cfg.horizon = 25;
  const auto tr = synth_vm_traces(cfg, 1, 9)[0];
  write_vm_trace(dir / "vm.csv", tr);
  CHECK(read_vm_trace(dir / "vm.csv", 25) == tr);

  const auto parsed = parse_vm_trace("id,arrival_event,lifetime,cores,memory\n7,0,2,1,3\n", 3);
  REQUIRE(parsed.input(1).request.has_value());
  CHECK(parsed.input(1).request->arrival_event == 1);
  CHECK_FALSE(parsed.input(2).request.has_value());
  CHECK_THROWS_AS(parse_vm_trace("id,arrival_event,lifetime,cores,memory\n1,0,1,1,1\n2,0,1,1,1\n", 3), ParseError);
  CHECK_THROWS_AS(parse_vm_trace("bad header\n", 3), ParseError);
}

TEST_CASE("generator config parses and rejects unknown fields") {
  const auto cfg = parse_vm_gen_config(R"({"pm_count": 3, "cpu_capacity": 8, "mem_capacity": 8,
    "arrival_rate": 0.5, "lifetime_dist": [[1, 1.0], [4, 3.0]],
    "vm_type_table": [{"cores": 2, "memory": 2, "weight": 1.0}], "horizon": 12})");
  CHECK(cfg.pm_count == 3);
  CHECK(cfg.lifetime_dist.size() == 2);
  CHECK(parse_vm_gen_config(vm_gen_config_json(cfg)).horizon == 12);
  CHECK_THROWS_AS(parse_vm_gen_config(R"({"pm_cnt": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_vm_gen_config(R"({"arrival_rate": 1.5})"), ConfigError);
}
