// Command-line front end for trace generation, training, evaluation and
// full experiment runs.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hindsight/envs/binpack.hpp"
#include "hindsight/envs/tabular.hpp"
#include "hindsight/envs/traces.hpp"
#include "hindsight/harness/evaluate.hpp"
#include "hindsight/harness/experiment.hpp"
#include "hindsight/harness/split.hpp"
#include "hindsight/harness/stats.hpp"
#include "hindsight/learn/forecast.hpp"
#include "hindsight/learn/net_policy.hpp"
#include "hindsight/learn/trainers.hpp"
#include "hindsight/planners/binpack.hpp"
#include "hindsight/planners/vm_search.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hindsight;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

/// A CLI config is an experiment config plus optional "binpack" and
/// "tabular" sections for the other environments.
struct CliConfig {
  harness::ExperimentConfig exp;
  json binpack = json{{"capacity", 3}, {"horizon", 8}};
  json tabular;
};

CliConfig load_cli_config(const std::string& path) {
  CliConfig c;
  if (path.empty()) return c;
  json j = json::parse(slurp(path));
  if (j.contains("binpack")) {
    c.binpack.update(j["binpack"]);
    j.erase("binpack");
  }
  if (j.contains("tabular")) {
    c.tabular = j["tabular"];
    j.erase("tabular");
  }
  c.exp = harness::parse_experiment_config(j.dump());
  return c;
}

envs::BinPackEnv binpack_env(const CliConfig& c) {
  return envs::BinPackEnv(c.binpack.at("capacity").get<int>(), c.binpack.at("horizon").get<int>());
}

envs::TabularEnv tabular_env(const CliConfig& c) {
  if (c.tabular.is_null()) throw ConfigError("the tabular environment needs a \"tabular\" config section");
  const auto& t = c.tabular;
  return envs::TabularEnv(t.at("n_states").get<int>(), t.at("n_actions").get<int>(), t.at("n_inputs").get<int>(),
                          t.at("reward").get<envs::TabularEnv::Table>(),
                          t.at("next").get<envs::TabularEnv::NextTable>(), t.value("x0", 0));
}

std::vector<fs::path> trace_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("trace directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && (e.path().extension() == ".csv" || e.path().extension() == ".txt")) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<ExoTrace<int>> load_int_traces(const fs::path& dir) {
  std::vector<ExoTrace<int>> out;
  for (const auto& f : trace_files(dir)) out.push_back(envs::read_int_trace(f));
  return out;
}

std::vector<double> parse_probs(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw ConfigError("--probs needs a comma-separated list");
  return out;
}

void write_training(const fs::path& out, const learn::TrainResult& r, json manifest) {
  r.net.save_file((out / "checkpoint.mlp").string());
  write_file(out / "curve.csv", harness::curve_csv(r.curve));
  manifest["best_iteration"] = r.best_iteration;
  manifest["best_val_return"] = r.best_val_return;
  manifest["labels"] = r.labels;
  manifest["inexact_labels"] = r.inexact_labels;
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

template <class E, class Planner>
learn::TrainResult train_generic(const std::string& algo, const E& env, const Planner& planner,
                                 std::span<const ExoTrace<InputOf<E>>> train,
                                 std::span<const ExoTrace<InputOf<E>>> val, const learn::TrainConfig& cfg) {
  const auto phi = learn::env_features(env);
  if (algo == "hl-mac") return learn::hindsight_learning_train(env, planner, phi, train, val, cfg, learn::HlLoss::kMac);
  if (algo == "hl-qd") {
    return learn::hindsight_learning_train(env, planner, phi, train, val, cfg, learn::HlLoss::kQDistill);
  }
  if (algo == "dqn") return learn::dqn_train(env, phi, train, val, cfg);
  if (algo == "ac") return learn::ac_train(env, phi, train, val, cfg);
  if (algo == "mac") return learn::mac_train(env, phi, train, val, cfg);
  throw ConfigError("algorithm '" + algo + "' is not available for this environment");
}

int cmd_gen_traces(const std::string& env, const std::string& config, int n, std::uint64_t seed,
                   const std::string& probs, int horizon, const fs::path& out) {
  fs::create_directories(out);
  char name[64];
  if (env == "vm") {
    const auto gen = config.empty() ? envs::VmGenConfig{} : envs::load_vm_gen_config(config);
    const auto traces = envs::synth_vm_traces(gen, n, seed);
    for (int i = 0; i < n; ++i) {
      std::snprintf(name, sizeof name, "trace_%04d.csv", i);
      envs::write_vm_trace(out / name, traces[static_cast<std::size_t>(i)]);
    }
    write_file(out / "generator.json", envs::vm_gen_config_json(gen) + "\n");
    return 0;
  }
  if (env != "binpack" && env != "inventory") throw ConfigError("unknown env '" + env + "'");
  const auto p = parse_probs(probs);
  for (int i = 0; i < n; ++i) {
    const auto s = derive_seed(seed, static_cast<std::uint64_t>(i));
    std::snprintf(name, sizeof name, "trace_%04d.txt", i);
    envs::write_int_trace(out / name, env == "binpack" ? envs::binpack_trace_sampler(p, horizon, s)
                                                       : envs::inventory_trace_sampler(p, horizon, s));
  }
  return 0;
}

int cmd_split(const fs::path& traces, double frac, std::uint64_t seed, const fs::path& out) {
  const auto files = trace_files(traces);
  const auto split = harness::split_dataset(files.size(), frac, seed);
  json manifest;
  auto copy_part = [&](const char* part, const std::vector<std::size_t>& idx) {
    fs::create_directories(out / part);
    json names = json::array();
    for (std::size_t i : idx) {
      fs::copy_file(files[i], out / part / files[i].filename(), fs::copy_options::overwrite_existing);
      names.push_back(files[i].filename().string());
    }
    manifest[part] = names;
  };
  copy_part("train", split.train);
  copy_part("validation", split.validation);
  copy_part("test", split.test);
  manifest["seed"] = seed;
  manifest["train_frac"] = frac;
  write_file(out / "split.json", manifest.dump(2) + "\n");
  return 0;
}

int cmd_train(const std::string& env_name, const std::string& algo, const fs::path& traces, const std::string& val_dir,
              const std::string& config, std::uint64_t seed, const fs::path& out) {
  auto cfg = load_cli_config(config);
  cfg.exp.seed = seed;
  cfg.exp.train.seed = harness::algo_seed(seed, algo);
  fs::create_directories(out);
  json manifest{{"env", env_name}, {"algo", algo}, {"seed", seed}, {"traces", traces.string()}};
  manifest["config"] = json::parse(harness::experiment_config_json(cfg.exp));

  if (env_name == "vm") {
    const envs::VmClusterEnv env(cfg.exp.cluster.cluster());
    const auto train = harness::load_vm_trace_dir(traces, cfg.exp.cluster.horizon);
    const auto val = val_dir.empty() ? decltype(train){} : harness::load_vm_trace_dir(val_dir, cfg.exp.cluster.horizon);
    auto tp = harness::make_vm_policy(algo, env, train, val, cfg.exp);
    if (!tp.result) {
      manifest["selected"] = tp.detail.empty() ? tp.named.name : tp.detail;
      write_file(out / "manifest.json", manifest.dump(2) + "\n");
      return 0;
    }
    write_training(out, *tp.result, manifest);
    return 0;
  }
  if (env_name == "binpack") {
    const auto env = binpack_env(cfg);
    manifest["binpack"] = cfg.binpack;
    const auto train = load_int_traces(traces);
    const auto val = val_dir.empty() ? decltype(train){} : load_int_traces(val_dir);
    write_training(out, train_generic(algo, env, planners::BinPackPlanner{}, std::span(train), std::span(val), cfg.exp.train),
                   manifest);
    return 0;
  }
  if (env_name == "tabular") {
    if (algo != "forecast") throw ConfigError("the tabular environment supports --algo forecast");
    const auto env = tabular_env(cfg);
    const auto data = load_int_traces(traces);
    const auto pi = learn::forecast_plan(env, data);
    manifest["marginal"] = learn::empirical_marginal(data, env.n_inputs());
    manifest["policy"] = learn::policy_table(env, pi);
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    return 0;
  }
  throw ConfigError("unknown env '" + env_name + "'");
}

int cmd_evaluate(const std::string& config, const fs::path& traces, const std::vector<std::string>& algos,
                 const std::vector<std::string>& checkpoints, const std::string& train_dir, std::uint64_t seed,
                 const fs::path& out) {
  const auto cfg = load_cli_config(config);
  const envs::VmClusterEnv env(cfg.exp.cluster.cluster());
  const auto test = harness::load_vm_trace_dir(traces, cfg.exp.cluster.horizon);
  const auto train = train_dir.empty() ? decltype(test){} : harness::load_vm_trace_dir(train_dir, cfg.exp.cluster.horizon);
  std::vector<harness::NamedPolicy> policies;
  for (const auto& a : algos) {
    if (harness::is_learned_algo(a)) throw ConfigError("learned policies are passed with --checkpoint name=path");
    policies.push_back(harness::make_vm_policy(a, env, train, {}, cfg.exp).named);
  }
  const auto phi = learn::env_features(env);
  for (const auto& entry : checkpoints) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw ConfigError("--checkpoint expects name=path");
    auto net = neural::Mlp::load_file(entry.substr(eq + 1));
    policies.push_back({entry.substr(0, eq), std::make_shared<learn::NetPolicy<envs::ClusterState>>(phi, std::move(net))});
  }
  const auto rep = harness::evaluate(env, policies, test, planners::VmSearchPlanner{cfg.exp.eval_planner_budget},
                                     derive_seed(seed, 11), cfg.exp.workers);
  fs::create_directories(out);
  write_file(out / "report.csv", harness::report_csv(rep));
  write_file(out / "report.json", harness::report_json(rep));
  std::cout << harness::report_csv(rep);
  return 0;
}

int cmd_plan(const std::string& env_name, const fs::path& trace, const std::string& config) {
  const auto cfg = load_cli_config(config);
  HindsightPlan plan;
  if (env_name == "vm") {
    const envs::VmClusterEnv env(cfg.exp.cluster.cluster());
    const auto tr = envs::read_vm_trace(trace, cfg.exp.cluster.horizon);
    plan = planners::VmSearchPlanner{cfg.exp.eval_planner_budget}(env, 1, env.initial_state(), tr.inputs());
  } else if (env_name == "binpack") {
    const auto env = binpack_env(cfg);
    const auto tr = envs::read_int_trace(trace);
    plan = planners::BinPackPlanner{}(env, 1, env.initial_state(), tr.inputs());
  } else {
    throw ConfigError("unknown env '" + env_name + "'");
  }
  json j{{"value", plan.value}, {"bound", plan.bound}, {"exact", plan.exact}, {"nodes", plan.nodes},
         {"actions", plan.actions}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_compare(const fs::path& report, const std::string& a, const std::string& b, const std::string& metric) {
  const json j = json::parse(slurp(report));
  auto sample = [&](const std::string& name) {
    for (const auto& r : j.at("rows")) {
      if (r.at("policy") == name) return r.at(metric).get<std::vector<double>>();
    }
    throw ConfigError("no row '" + name + "' in " + report.string());
  };
  const auto sa = sample(a), sb = sample(b);
  const auto w = harness::welch_t(sa, sb);
  json out{{"a", a}, {"b", b}, {"metric", metric}, {"t", harness::fmt9(w.t)}, {"dof", harness::fmt9(w.dof)},
           {"p", harness::fmt9(w.p)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& config, const std::string& seed_override, const fs::path& out) {
  auto cfg = harness::load_experiment_config(config);
  if (!seed_override.empty()) cfg.seed = std::stoull(seed_override);
  const auto res = harness::run_experiment(cfg, out);
  std::cout << harness::report_csv(res.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hindsight planning and learning for MDPs with exogenous inputs"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-traces", "Write synthetic traces");
  std::string gen_env = "vm", gen_config, gen_probs = "1,1,1";
  int gen_n = 10, gen_horizon = 8;
  std::uint64_t gen_seed = 0;
  fs::path gen_out;
  gen->add_option("--env", gen_env, "vm, binpack or inventory");
  gen->add_option("--config", gen_config, "VM generator config (JSON)");
  gen->add_option("--n", gen_n, "number of traces");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--probs", gen_probs, "binpack/inventory input weights, comma separated");
  gen->add_option("--horizon", gen_horizon, "binpack/inventory horizon");
  gen->add_option("--out", gen_out)->required();

  auto* split = app.add_subcommand("split", "Split a trace directory into train/validation/test");
  fs::path split_traces, split_out;
  double split_frac = 0.6;
  std::uint64_t split_seed = 0;
  split->add_option("--traces", split_traces)->required();
  split->add_option("--train-frac", split_frac);
  split->add_option("--seed", split_seed);
  split->add_option("--out", split_out)->required();

  auto* train = app.add_subcommand("train", "Train or select a policy");
  std::string train_env = "vm", train_algo, train_config, train_val;
  fs::path train_traces, train_out;
  std::uint64_t train_seed = 0;
  train->add_option("--env", train_env, "vm, binpack or tabular");
  train->add_option("--algo", train_algo, "hl-mac, hl-qd, dqn, ac, mac, pg-hb, erm, forecast")->required();
  train->add_option("--traces", train_traces)->required();
  train->add_option("--val", train_val, "validation trace directory");
  train->add_option("--config", train_config);
  train->add_option("--seed", train_seed);
  train->add_option("--out", train_out)->required();

  auto* eval = app.add_subcommand("evaluate", "Evaluate policies against Best Fit and the hindsight bound");
  std::string eval_config, eval_train;
  fs::path eval_traces, eval_out;
  std::vector<std::string> eval_algos, eval_ckpts;
  std::uint64_t eval_seed = 0;
  eval->add_option("--config", eval_config);
  eval->add_option("--traces", eval_traces, "test trace directory")->required();
  eval->add_option("--algo", eval_algos, "heuristic:<name> or erm");
  eval->add_option("--checkpoint", eval_ckpts, "name=path of a trained network");
  eval->add_option("--train-traces", eval_train, "traces for the Reserve histogram and ERM");
  eval->add_option("--seed", eval_seed);
  eval->add_option("--out", eval_out)->required();

  auto* plan = app.add_subcommand("plan", "Solve one trace in hindsight");
  std::string plan_env = "vm", plan_config;
  fs::path plan_trace;
  plan->add_option("--env", plan_env, "vm or binpack");
  plan->add_option("--trace", plan_trace)->required();
  plan->add_option("--config", plan_config);

  auto* compare = app.add_subcommand("compare", "Welch's test between two rows of a report");
  fs::path cmp_report;
  std::string cmp_a, cmp_b, cmp_metric = "pms_used";
  compare->add_option("--report", cmp_report, "report.json")->required();
  compare->add_option("--a", cmp_a)->required();
  compare->add_option("--b", cmp_b)->required();
  compare->add_option("--metric", cmp_metric, "returns, pms_used or pms_saved_per_trace");

  auto* report = app.add_subcommand("report", "Run a full experiment from a config");
  std::string rep_config, rep_seed;
  fs::path rep_out;
  report->add_option("--config", rep_config)->required();
  report->add_option("--seed", rep_seed, "overrides the config seed");
  report->add_option("--out", rep_out)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen_traces(gen_env, gen_config, gen_n, gen_seed, gen_probs, gen_horizon, gen_out);
    if (*split) return cmd_split(split_traces, split_frac, split_seed, split_out);
    if (*train) return cmd_train(train_env, train_algo, train_traces, train_val, train_config, train_seed, train_out);
    if (*eval) return cmd_evaluate(eval_config, eval_traces, eval_algos, eval_ckpts, eval_train, eval_seed, eval_out);
    if (*plan) return cmd_plan(plan_env, plan_trace, plan_config);
    if (*compare) return cmd_compare(cmp_report, cmp_a, cmp_b, cmp_metric);
    if (*report) return cmd_report(rep_config, rep_seed, rep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
