#include "hindsight/harness/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hindsight/core/errors.hpp"
#include "hindsight/harness/split.hpp"
#include "hindsight/learn/net_policy.hpp"
#include "hindsight/planners/vm_search.hpp"

#ifndef HINDSIGHT_GIT_REV
#define HINDSIGHT_GIT_REV "unknown"
#endif

namespace hindsight::harness {

using envs::ClusterState;
using envs::VmEvent;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kLearned{"hl-mac", "hl-qd", "dqn", "ac", "mac", "pg-hb"};
const std::vector<std::string> kHeuristics{"best-fit", "round-robin", "random", "balance", "reserve", "reserve-online"};

std::string strip_heuristic_prefix(const std::string& algo) {
  const std::string prefix = "heuristic:";
  return algo.rfind(prefix, 0) == 0 ? algo.substr(prefix.size()) : algo;
}

learn::TrainConfig train_config_from(const json& j) {
  learn::TrainConfig c;
  for (const auto& [key, _] : j.items()) {
    static const char* const known[] = {"iterations", "rollouts_per_iteration", "workers", "grad_steps", "batch_size",
                                        "lr", "gamma", "entropy_coef", "actor_coef", "tau", "buffer_capacity",
                                        "label_cap", "epsilon_start", "epsilon_end", "rms_decay", "rms_eps",
                                        "hidden", "seed"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("unknown train config field: " + key);
    }
  }
  c.iterations = j.value("iterations", c.iterations);
  c.rollouts_per_iteration = j.value("rollouts_per_iteration", c.rollouts_per_iteration);
  c.workers = j.value("workers", c.workers);
  c.grad_steps = j.value("grad_steps", c.grad_steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.gamma = j.value("gamma", c.gamma);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.actor_coef = j.value("actor_coef", c.actor_coef);
  c.tau = j.value("tau", c.tau);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.label_cap = j.value("label_cap", c.label_cap);
  c.epsilon_start = j.value("epsilon_start", c.epsilon_start);
  c.epsilon_end = j.value("epsilon_end", c.epsilon_end);
  c.rms_decay = j.value("rms_decay", c.rms_decay);
  c.rms_eps = j.value("rms_eps", c.rms_eps);
  c.hidden = j.value("hidden", c.hidden);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

json train_config_to(const learn::TrainConfig& c) {
  return json{{"iterations", c.iterations},
              {"rollouts_per_iteration", c.rollouts_per_iteration},
              {"workers", c.workers},
              {"grad_steps", c.grad_steps},
              {"batch_size", c.batch_size},
              {"lr", c.lr},
              {"gamma", c.gamma},
              {"entropy_coef", c.entropy_coef},
              {"actor_coef", c.actor_coef},
              {"tau", c.tau},
              {"buffer_capacity", c.buffer_capacity},
              {"label_cap", c.label_cap},
              {"epsilon_start", c.epsilon_start},
              {"epsilon_end", c.epsilon_end},
              {"rms_decay", c.rms_decay},
              {"rms_eps", c.rms_eps},
              {"hidden", c.hidden},
              {"seed", c.seed}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

template <class T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  static const char* const known[] = {"seed",      "workers", "cluster",      "num_traces",          "trace_dir",
                                      "train_frac", "algos",  "train",        "min_reserved",        "eval_planner_budget",
                                      "label_planner_budget"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("unknown experiment config field: " + key);
    }
  }
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (j.contains("cluster")) c.cluster = envs::parse_vm_gen_config(j["cluster"].dump());
    c.num_traces = j.value("num_traces", c.num_traces);
    c.trace_dir = j.value("trace_dir", c.trace_dir);
    c.train_frac = j.value("train_frac", c.train_frac);
    c.algos = j.value("algos", c.algos);
    if (j.contains("train")) c.train = train_config_from(j["train"]);
    c.min_reserved = j.value("min_reserved", c.min_reserved);
    c.eval_planner_budget = j.value("eval_planner_budget", c.eval_planner_budget);
    c.label_planner_budget = j.value("label_planner_budget", c.label_planner_budget);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.algos.empty()) throw ConfigError("algos must be nonempty");
  for (const auto& a : c.algos) {
    const auto name = strip_heuristic_prefix(a);
    const bool known_algo = std::count(kLearned.begin(), kLearned.end(), name) ||
                            std::count(kHeuristics.begin(), kHeuristics.end(), name) || name == "erm";
    if (!known_algo) throw ConfigError("unknown algorithm '" + a + "'");
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string experiment_config_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["cluster"] = json::parse(envs::vm_gen_config_json(c.cluster));
  j["num_traces"] = c.num_traces;
  j["trace_dir"] = c.trace_dir;
  j["train_frac"] = c.train_frac;
  j["algos"] = c.algos;
  j["train"] = train_config_to(c.train);
  j["min_reserved"] = c.min_reserved;
  j["eval_planner_budget"] = c.eval_planner_budget;
  j["label_planner_budget"] = c.label_planner_budget;
  return j.dump(2);
}

bool is_learned_algo(const std::string& algo) { return std::count(kLearned.begin(), kLearned.end(), algo) > 0; }

std::vector<std::string> heuristic_names() { return kHeuristics; }

heuristics::ReserveProfile reserve_profile_from(std::span<const ExoTrace<VmEvent>> traces, double min_reserved) {
  heuristics::ReserveProfile p;
  p.min_reserved = min_reserved;
  for (const auto& tr : traces) {
    for (const auto& ev : tr.inputs()) {
      if (ev.request) p.observe(*ev.request);
    }
  }
  return p;
}

std::uint64_t algo_seed(std::uint64_t seed, const std::string& algo) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : algo) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return derive_seed(seed, 21, h);
}

TrainedPolicy make_vm_policy(const std::string& algo_in, const envs::VmClusterEnv& env,
                             std::span<const ExoTrace<VmEvent>> train, std::span<const ExoTrace<VmEvent>> val,
                             const ExperimentConfig& config) {
  const std::string algo = strip_heuristic_prefix(algo_in);
  const auto profile = reserve_profile_from(train, config.min_reserved);
  TrainedPolicy out;
  out.named.name = algo;
  if (std::count(kHeuristics.begin(), kHeuristics.end(), algo)) {
    out.named.policy = heuristics::make_heuristic(algo, profile);
    return out;
  }
  if (algo == "erm") {
    std::vector<PolicyPtr<ClusterState>> cls;
    for (const auto& h : kHeuristics) cls.push_back(heuristics::make_heuristic(h, profile));
    const auto k = learn::erm_search(env, train, cls, algo_seed(config.seed, algo));
    out.named.policy = cls[k];
    out.detail = kHeuristics[k];
    return out;
  }
  if (!is_learned_algo(algo)) throw ConfigError("unknown algorithm '" + algo_in + "'");
  auto cfg = config.train;
  cfg.seed = algo_seed(config.seed, algo);
  const auto phi = learn::env_features(env);
  const planners::VmSearchPlanner labeler{config.label_planner_budget};
  learn::TrainResult r;
  if (algo == "hl-mac") {
    r = learn::hindsight_learning_train(env, labeler, phi, train, val, cfg, learn::HlLoss::kMac);
  } else if (algo == "hl-qd") {
    r = learn::hindsight_learning_train(env, labeler, phi, train, val, cfg, learn::HlLoss::kQDistill);
  } else if (algo == "dqn") {
    r = learn::dqn_train(env, phi, train, val, cfg);
  } else if (algo == "ac") {
    r = learn::ac_train(env, phi, train, val, cfg);
  } else if (algo == "mac") {
    r = learn::mac_train(env, phi, train, val, cfg);
  } else {
    heuristics::BestFitPolicy baseline;
    r = learn::pg_hindsight_baseline_train(env, phi, train, val, cfg, baseline);
  }
  out.named.policy = std::make_shared<learn::NetPolicy<ClusterState>>(phi, r.net);
  out.result = std::move(r);
  return out;
}

std::string curve_csv(const std::vector<learn::CurvePoint>& curve) {
  std::ostringstream os;
  os << "iteration,loss,train_return,val_return\n";
  for (const auto& p : curve) {
    os << p.iteration << ',' << fmt9(p.loss) << ',' << fmt9(p.train_return) << ',' << fmt9(p.val_return) << '\n';
  }
  return os.str();
}

std::vector<ExoTrace<VmEvent>> load_vm_trace_dir(const std::filesystem::path& dir, int horizon) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("trace directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ExoTrace<VmEvent>> out;
  for (const auto& f : files) out.push_back(envs::read_vm_trace(f, horizon));
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto partial = out_dir / "PARTIAL";
  write_file(partial, "started\n");
  try {
    const envs::VmClusterEnv env(config.cluster.cluster());
    const auto traces = config.trace_dir.empty()
                            ? envs::synth_vm_traces(config.cluster, config.num_traces, derive_seed(config.seed, 7))
                            : load_vm_trace_dir(config.trace_dir, config.cluster.horizon);
    const auto split = split_dataset(traces.size(), config.train_frac, derive_seed(config.seed, 8));
    const auto train = pick(traces, split.train);
    const auto val = pick(traces, split.validation);
    const auto test = pick(traces, split.test);

    ExperimentResult res;
    std::vector<NamedPolicy> named;
    for (const auto& algo : config.algos) {
      res.policies.push_back(make_vm_policy(algo, env, train, val, config));
      named.push_back(res.policies.back().named);
    }
    res.report = evaluate(env, named, test, planners::VmSearchPlanner{config.eval_planner_budget},
                          derive_seed(config.seed, 11), config.workers);

    std::filesystem::create_directories(out_dir / "curves");
    std::filesystem::create_directories(out_dir / "checkpoints");
    json algos = json::array();
    for (const auto& tp : res.policies) {
      json a{{"name", tp.named.name}};
      if (!tp.detail.empty()) a["selected"] = tp.detail;
      if (tp.result) {
        write_file(out_dir / "curves" / (tp.named.name + ".csv"), curve_csv(tp.result->curve));
        tp.result->net.save_file((out_dir / "checkpoints" / (tp.named.name + ".mlp")).string());
        a["seed"] = algo_seed(config.seed, tp.named.name);
        a["best_iteration"] = tp.result->best_iteration;
        a["best_val_return"] = json::parse(fmt9(tp.result->best_val_return));
        a["labels"] = tp.result->labels;
        a["inexact_labels"] = tp.result->inexact_labels;
      }
      algos.push_back(std::move(a));
    }
    write_file(out_dir / "report.csv", report_csv(res.report));
    write_file(out_dir / "report.json", report_json(res.report));

    json manifest;
    manifest["config"] = json::parse(experiment_config_json(config));
    manifest["git_revision"] = HINDSIGHT_GIT_REV;
    manifest["traces"] = traces.size();
    manifest["split"] = json{{"train", split.train}, {"validation", split.validation}, {"test", split.test}};
    manifest["algorithms"] = std::move(algos);
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    std::filesystem::remove(partial);
    return res;
  } catch (const std::exception& e) {
    write_file(partial, std::string("error: ") + e.what() + "\n");
    throw;
  }
}

}  // namespace hindsight::harness
