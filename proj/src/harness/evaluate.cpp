#include "hindsight/harness/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/rng.hpp"
#include "hindsight/core/rollout.hpp"
#include "hindsight/core/stats.hpp"
#include "hindsight/harness/stats.hpp"
#include "hindsight/heuristics/vm_heuristics.hpp"
#include "hindsight/learn/net_policy.hpp"

namespace hindsight::harness {

using envs::ClusterState;
using envs::VmEvent;

namespace {

// Slack for comparing a policy's return with the planner bound.
constexpr double kBoundTol = 1e-7;

PolicyRow summarize(std::string name, std::vector<EpisodeStats> eps, const std::vector<double>& bf_pms) {
  PolicyRow r;
  r.name = std::move(name);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    r.returns.push_back(eps[i].total_return);
    r.pms_used.push_back(eps[i].pms_used);
    r.pms_saved.push_back(bf_pms[i] - eps[i].pms_used);
  }
  r.mean_return = sample_mean(r.returns);
  r.ci95 = ci95_halfwidth(r.returns);
  r.pms_saved_mean = sample_mean(r.pms_saved);
  r.p_vs_bestfit = r.returns.size() >= 2 ? welch_t(r.pms_used, bf_pms).p : 1.0;
  return r;
}

}  // namespace

EpisodeStats play_vm(const envs::VmClusterEnv& env, Policy<ClusterState>& policy, const ExoTrace<VmEvent>& trace,
                     std::uint64_t seed) {
  const auto traj = rollout(env, policy, trace, seed);
  EpisodeStats st;
  st.total_return = traj.total_return;
  for (const auto& step : traj.steps) st.pms_used += envs::utilized_pms(step.next);
  if (!traj.steps.empty()) st.pms_used /= static_cast<double>(traj.steps.size());
  return st;
}

const PolicyRow& EvalReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw ConfigError("no report row named '" + name + "'");
}

EvalReport evaluate(const envs::VmClusterEnv& env, const std::vector<NamedPolicy>& policies,
                    std::span<const ExoTrace<VmEvent>> test, const planners::VmSearchPlanner& planner,
                    std::uint64_t seed, int workers) {
  if (test.empty()) throw EmptyDataset("evaluation needs at least one test trace");
  const std::size_t n = test.size();

  std::vector<HindsightPlan> plans(n);
  learn::parallel_for(n, workers, [&](std::size_t i) {
    plans[i] = planner(env, 1, env.initial_state(), test[i].inputs());
  });

  auto play_all = [&](Policy<ClusterState>& p) {
    std::vector<EpisodeStats> eps;
    for (std::size_t i = 0; i < n; ++i) eps.push_back(play_vm(env, p, test[i], derive_seed(seed, i)));
    return eps;
  };

  heuristics::BestFitPolicy bf;
  const auto bf_eps = play_all(bf);
  std::vector<double> bf_pms;
  for (const auto& e : bf_eps) bf_pms.push_back(e.pms_used);

  EvalReport rep;
  rep.rows.push_back(summarize(kBestFitRow, bf_eps, bf_pms));
  for (const auto& np : policies) {
    if (np.name == kBestFitRow) continue;
    if (!np.policy) throw ConfigError("policy '" + np.name + "' is null");
    rep.rows.push_back(summarize(np.name, play_all(*np.policy), bf_pms));
  }

  std::vector<EpisodeStats> bound_eps;
  for (std::size_t i = 0; i < n; ++i) {
    OpenLoopPolicy<ClusterState> replay(plans[i].actions);
    auto st = play_vm(env, replay, test[i], 0);
    st.total_return = plans[i].bound;
    bound_eps.push_back(st);
    rep.bound_exact.push_back(plans[i].exact);
  }
  for (const auto& r : rep.rows) {
    for (std::size_t i = 0; i < n; ++i) {
      if (r.returns[i] > plans[i].bound + kBoundTol) ++rep.dominance_violations;
    }
  }
  rep.rows.push_back(summarize(kBoundRow, bound_eps, bf_pms));
  for (auto& r : rep.rows) r.headroom = headroom_capture(rep, r.name);
  return rep;
}

std::optional<double> headroom_capture(const EvalReport& report, const std::string& policy) {
  const double bf = report.row(kBestFitRow).mean_return;
  const double den = report.row(kBoundRow).mean_return - bf;
  if (!(den > 0.0)) return std::nullopt;
  return (report.row(policy).mean_return - bf) / den;
}

std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "policy,mean_return,ci95,pms_saved,p_vs_bestfit,headroom\n";
  for (const auto& r : report.rows) {
    os << r.name << ',' << fmt9(r.mean_return) << ',' << fmt9(r.ci95) << ',' << fmt9(r.pms_saved_mean) << ','
       << fmt9(r.p_vs_bestfit) << ',' << (r.headroom ? fmt9(*r.headroom) : "n/a") << '\n';
  }
  return os.str();
}

std::string report_json(const EvalReport& report) {
  // Numbers go through fmt9 so the JSON matches the CSV digit for digit.
  auto nums = [](const std::vector<double>& xs) {
    auto a = nlohmann::ordered_json::array();
    for (double x : xs) a.push_back(std::isfinite(x) ? nlohmann::ordered_json::parse(fmt9(x)) : nullptr);
    return a;
  };
  auto num = [](double x) {
    return std::isfinite(x) ? nlohmann::ordered_json::parse(fmt9(x)) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["traces"] = report.rows.empty() ? 0 : report.rows.front().returns.size();
  j["bound_exact"] = report.bound_exact;
  j["dominance_violations"] = report.dominance_violations;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json e;
    e["policy"] = r.name;
    e["mean_return"] = num(r.mean_return);
    e["ci95"] = num(r.ci95);
    e["pms_saved"] = num(r.pms_saved_mean);
    e["p_vs_bestfit"] = num(r.p_vs_bestfit);
    e["headroom"] = r.headroom ? num(*r.headroom) : nlohmann::ordered_json(nullptr);
    e["returns"] = nums(r.returns);
    e["pms_used"] = nums(r.pms_used);
    e["pms_saved_per_trace"] = nums(r.pms_saved);
    j["rows"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace hindsight::harness
