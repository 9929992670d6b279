#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/rollout.hpp"
#include "hindsight/envs/traces.hpp"
#include "hindsight/harness/evaluate.hpp"
#include "hindsight/harness/experiment.hpp"
#include "hindsight/harness/split.hpp"
#include "hindsight/harness/stats.hpp"
#include "hindsight/heuristics/vm_heuristics.hpp"

using namespace hindsight;
using namespace hindsight::harness;

namespace {

/// Two-sided Student-t tail by Simpson integration of the density.
double t_tail_by_quadrature(double t, double dof) {
  const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * M_PI);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / dof, -(dof + 1) / 2); };
  const int n = 200000;
  const double a = 0.0, b = std::abs(t), h = (b - a) / n;
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * s * h / 3.0;
}

envs::VmGenConfig small_cluster() {
  envs::VmGenConfig c;
  c.pm_count = 4;
  c.cpu_capacity = 8;
  c.mem_capacity = 32;
  c.arrival_rate = 0.9;
  c.horizon = 10;
  c.lifetime_dist = {{2, 1.0}, {6, 1.0}};
  c.vm_type_table = {{1, 2, 2.0, {}}, {2, 4, 1.0, {}}, {4, 8, 1.0, {}}};
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("split sizes, determinism and errors") {
  const auto s = split_dataset(10, 0.8, 3);
  CHECK(s.train.size() == 8);
  CHECK(s.validation.size() == 1);
  CHECK(s.test.size() == 1);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);
  const auto again = split_dataset(10, 0.8, 3);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK_THROWS_AS(split_dataset(10, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(split_dataset(2, 0.5, 3), ConfigError);
  const auto t = split_dataset(80, 0.5, 1);
  CHECK(t.train.size() == 40);
  CHECK(t.validation.size() == 20);
  CHECK(t.test.size() == 20);
}

TEST_CASE("Welch's test") {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  const auto r = welch_t(a, b);
  CHECK(r.t == doctest::Approx(-std::sqrt(1.5)));
  CHECK(r.dof == doctest::Approx(4.0));
  const auto swapped = welch_t(b, a);
  CHECK(swapped.t == doctest::Approx(-r.t));
  CHECK(swapped.p == doctest::Approx(r.p));
  const auto same = welch_t(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == doctest::Approx(1.0));
  const std::vector<double> flat{2, 2, 2};
  CHECK(welch_t(flat, flat).p == 1.0);
  CHECK(welch_t(flat, std::vector<double>{3, 3}).p == 0.0);
  CHECK_THROWS_AS(welch_t(std::vector<double>{1}, a), EmptyDataset);
}

TEST_CASE("t tail probabilities: tables and quadrature") {
  CHECK(std::abs(student_t_two_sided_p(2.228, 10) - 0.05) < 2e-4);
  CHECK(std::abs(student_t_two_sided_p(12.706, 1) - 0.05) < 2e-4);
  CHECK(std::abs(student_t_two_sided_p(2.776, 4) - 0.05) < 2e-4);
  CHECK(student_t_two_sided_p(0.0, 3) == doctest::Approx(1.0));
  for (double dof : {1.5, 4.0, 9.3, 30.0}) {
    for (double t : {0.3, 1.0, 2.5}) CHECK(std::abs(student_t_two_sided_p(t, dof) - t_tail_by_quadrature(t, dof)) < 1e-8);
  }
}

TEST_CASE("95% interval uses the t quantile") {
  const std::vector<double> two{0.0, 2.0};  // s = sqrt(2), n = 2
  CHECK(ci95_halfwidth(two) == doctest::Approx(12.7062 * std::sqrt(2.0) / std::sqrt(2.0)).epsilon(1e-4));
  CHECK(ci95_halfwidth(std::vector<double>{5.0}) == 0.0);
}

TEST_CASE("evaluation against Best Fit") {
  const auto gen = small_cluster();
  const envs::VmClusterEnv env(gen.cluster());
  const auto test = envs::synth_vm_traces(gen, 12, 4);
  const planners::VmSearchPlanner planner{200'000};

  SUBCASE("Best Fit alone has zero deltas") {
    const auto rep = evaluate(env, {{"best-fit", std::make_shared<heuristics::BestFitPolicy>()}}, test, planner, 1);
    REQUIRE(rep.rows.size() == 2);
    for (double d : rep.row(kBestFitRow).pms_saved) CHECK(d == 0.0);
    CHECK(rep.row(kBestFitRow).p_vs_bestfit == 1.0);
    if (rep.row(kBestFitRow).headroom) CHECK(*rep.row(kBestFitRow).headroom == 0.0);
    if (rep.row(kBoundRow).headroom) CHECK(*rep.row(kBoundRow).headroom == doctest::Approx(1.0));
  }
  SUBCASE("Random <= Best Fit <= bound, and the bound dominates per trace") {
    const auto rep = evaluate(env,
                              {{"random", std::make_shared<heuristics::RandomAllocPolicy>()},
                               {"round-robin", std::make_shared<heuristics::RoundRobinPolicy>()}},
                              test, planner, 1, 3);
    CHECK(rep.row("random").mean_return <= rep.row(kBestFitRow).mean_return);
    CHECK(rep.row(kBestFitRow).mean_return <= rep.row(kBoundRow).mean_return);
    CHECK(rep.dominance_violations == 0);
    for (const auto& r : rep.rows) {
      for (std::size_t i = 0; i < test.size(); ++i) CHECK(r.returns[i] <= rep.row(kBoundRow).returns[i] + 1e-7);
    }
    const auto serial = evaluate(env,
                                 {{"random", std::make_shared<heuristics::RandomAllocPolicy>()},
                                  {"round-robin", std::make_shared<heuristics::RoundRobinPolicy>()}},
                                 test, planner, 1, 1);
    CHECK(report_csv(serial) == report_csv(rep));
  }
  SUBCASE("single trace equals exact_value") {
    auto bal = std::make_shared<heuristics::BalancePolicy>();
    const auto one = std::span(test).first(1);
    const auto rep = evaluate(env, {{"balance", bal}}, one, planner, 1);
    CHECK(rep.row("balance").returns[0] == exact_value(env, *bal, test[0]));
    heuristics::BestFitPolicy bf;
    CHECK(rep.row(kBestFitRow).returns[0] == exact_value(env, bf, test[0]));
  }
}

TEST_CASE("CSV formatting") {
  CHECK(fmt9(1.0 / 3.0) == "0.333333333");
  CHECK(fmt9(-2.0) == "-2");
  EvalReport rep;
  PolicyRow r;
  r.name = "x";
  r.mean_return = -1.5;
  rep.rows.push_back(r);
  CHECK(report_csv(rep) == "policy,mean_return,ci95,pms_saved,p_vs_bestfit,headroom\nx,-1.5,0,0,1,n/a\n");
}

TEST_CASE("experiment config parsing") {
  const auto c = parse_experiment_config(R"({"seed": 4, "algos": ["best-fit", "heuristic:random"], "train": {"lr": 0.01}})");
  CHECK(c.seed == 4);
  CHECK(c.train.lr == 0.01);
  CHECK(parse_experiment_config(experiment_config_json(c)).algos == c.algos);
  CHECK_THROWS_AS(parse_experiment_config(R"({"algos": ["first-fit"]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"train": {"gamma": 2}})"), ConfigError);
}

TEST_CASE("run_experiment artifacts and reproducibility") {
  const auto root = std::filesystem::temp_directory_path() / "hindsight_harness_test";
  std::filesystem::remove_all(root);
  ExperimentConfig c;
  c.seed = 9;
  c.cluster = small_cluster();
  c.num_traces = 12;
  c.train_frac = 0.5;
  c.algos = {"best-fit"};
  run_experiment(c, root / "a");
  CHECK(std::filesystem::exists(root / "a" / "report.csv"));
  CHECK(std::filesystem::exists(root / "a" / "manifest.json"));
  CHECK_FALSE(std::filesystem::exists(root / "a" / "PARTIAL"));
  CHECK(std::filesystem::is_empty(root / "a" / "curves"));

  c.algos = {"best-fit", "random", "erm", "hl-mac"};
  c.train.iterations = 2;
  c.train.grad_steps = 3;
  c.train.hidden = {4};
  run_experiment(c, root / "b");
  run_experiment(c, root / "c");
  CHECK(slurp(root / "b" / "report.csv") == slurp(root / "c" / "report.csv"));
  CHECK(std::filesystem::exists(root / "b" / "curves" / "hl-mac.csv"));
  CHECK(std::filesystem::exists(root / "b" / "checkpoints" / "hl-mac.mlp"));

  c.train_frac = 1.0;
  CHECK_THROWS_AS(run_experiment(c, root / "d"), ConfigError);
  CHECK(std::filesystem::exists(root / "d" / "PARTIAL"));
  std::filesystem::remove_all(root);
}
