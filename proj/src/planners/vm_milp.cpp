#include "hindsight/planners/vm_milp.hpp"

#include <cmath>

#include "hindsight/core/errors.hpp"

namespace hindsight::planners {

using milp::Row;
using milp::Sense;

VmMilp build_vm_milp(const envs::ClusterState& pre, int t, std::span<const envs::VmEvent> suffix,
                     DensityDenominator mode) {
  VmMilp m;
  m.first_event = t;
  m.num_events = static_cast<int>(suffix.size());
  m.num_pms = static_cast<int>(pre.pms.size());
  const auto E = static_cast<std::size_t>(m.num_events);
  const auto P = static_cast<std::size_t>(m.num_pms);

  m.alpha.assign(E, std::vector<int>(P, 0));
  m.beta.assign(E, std::vector<int>(P, 0));
  for (std::size_t e = 0; e < E; ++e) {
    const int event = t + static_cast<int>(e);
    for (std::size_t p = 0; p < P; ++p) {
      for (const auto& vm : pre.pms[p].vms) {
        if (vm.end_event > event) {
          m.alpha[e][p] += vm.cores;
          m.beta[e][p] += vm.memory;
        }
      }
    }
  }

  auto& slot = m.slot;
  for (std::size_t e = 0; e < E; ++e) {
    if (suffix[e].request) {
      m.vms.push_back(*suffix[e].request);
      slot.push_back(static_cast<int>(e));
    }
  }
  const std::size_t V = m.vms.size();
  m.eta.assign(V, std::vector<int>(E, 0));
  for (std::size_t v = 0; v < V; ++v) {
    for (std::size_t e = static_cast<std::size_t>(slot[v]); e < E; ++e) {
      if (t + static_cast<int>(e) < m.vms[v].end_event()) m.eta[v][e] = 1;
    }
  }

  long all_suffix_cores = 0;
  for (const auto& vm : m.vms) all_suffix_cores += vm.cores;
  m.denominator.assign(E, 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    long c = 0;
    for (std::size_t p = 0; p < P; ++p) c += m.alpha[e][p];
    if (mode == DensityDenominator::kActive) {
      for (std::size_t v = 0; v < V; ++v) c += static_cast<long>(m.vms[v].cores) * m.eta[v][e];
    } else {
      c += all_suffix_cores;
    }
    m.denominator[e] = static_cast<double>(c);
  }

  auto& prob = m.problem;
  m.x_index.assign(V, std::vector<int>(P, -1));
  for (std::size_t v = 0; v < V; ++v) {
    for (std::size_t p = 0; p < P; ++p) m.x_index[v][p] = prob.add_var(0.0, 0.0, 1.0, true);
  }
  m.y_index.assign(E, std::vector<int>(P, -1));
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t p = 0; p < P; ++p) {
      const double coef = m.denominator[e] > 0.0 ? -pre.pms[p].cpu_capacity / m.denominator[e] : 0.0;
      m.y_index[e][p] = prob.add_var(coef, 0.0, 1.0, true);
    }
    if (m.denominator[e] <= 0.0) prob.constant -= 1.0;
  }

  for (std::size_t v = 0; v < V; ++v) {
    Row r{{}, Sense::kEq, 1.0, "assign"};
    for (std::size_t p = 0; p < P; ++p) r.coefs.emplace_back(m.x_index[v][p], 1.0);
    prob.add_row(std::move(r));
  }
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t p = 0; p < P; ++p) {
      Row cpu{{}, Sense::kLe, static_cast<double>(pre.pms[p].cpu_capacity - m.alpha[e][p]), "cpu"};
      Row mem{{}, Sense::kLe, static_cast<double>(pre.pms[p].mem_capacity - m.beta[e][p]), "mem"};
      for (std::size_t v = 0; v < V; ++v) {
        if (!m.eta[v][e]) continue;
        cpu.coefs.emplace_back(m.x_index[v][p], m.vms[v].cores);
        mem.coefs.emplace_back(m.x_index[v][p], m.vms[v].memory);
      }
      prob.add_row(std::move(cpu));
      prob.add_row(std::move(mem));
    }
  }
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t p = 0; p < P; ++p) {
      if (m.alpha[e][p] > 0) prob.add_row({{{m.y_index[e][p], 1.0}}, Sense::kGe, 1.0, "hist"});
    }
  }
  for (std::size_t v = 0; v < V; ++v) {
    for (std::size_t e = 0; e < E; ++e) {
      if (!m.eta[v][e]) continue;
      for (std::size_t p = 0; p < P; ++p) {
        prob.add_row({{{m.x_index[v][p], 1.0}, {m.y_index[e][p], -1.0}}, Sense::kLe, 0.0, "link"});
      }
    }
  }
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t p = 0; p < P; ++p) {
      Row r{{{m.y_index[e][p], 1.0}}, Sense::kLe, m.alpha[e][p] > 0 ? 1.0 : 0.0, "or"};
      for (std::size_t v = 0; v < V; ++v) {
        if (m.eta[v][e]) r.coefs.emplace_back(m.x_index[v][p], -1.0);
      }
      prob.add_row(std::move(r));
    }
  }
  return m;
}

std::vector<Action> decode_vm_actions(const VmMilp& m, const std::vector<double>& x,
                                      std::span<const envs::VmEvent> suffix) {
  std::vector<Action> actions;
  std::size_t v = 0;
  for (const auto& ev : suffix) {
    if (!ev.request) {
      actions.push_back(kFailAction);
      continue;
    }
    Action chosen = kFailAction;
    for (int p = 0; p < m.num_pms; ++p) {
      if (std::round(x[static_cast<std::size_t>(m.x_index[v][static_cast<std::size_t>(p)])]) == 1.0) {
        chosen = p;
        break;
      }
    }
    actions.push_back(chosen);
    ++v;
  }
  return actions;
}

std::optional<std::vector<double>> encode_vm_actions(const VmMilp& m, std::span<const Action> actions) {
  std::vector<double> x(static_cast<std::size_t>(m.problem.num_vars()), 0.0);
  if (actions.size() != static_cast<std::size_t>(m.num_events)) return std::nullopt;
  std::size_t v = 0;
  for (; v < m.vms.size(); ++v) {
    const Action a = actions[static_cast<std::size_t>(m.slot[v])];
    if (a < 0 || a >= m.num_pms) return std::nullopt;
    x[static_cast<std::size_t>(m.x_index[v][static_cast<std::size_t>(a)])] = 1.0;
  }
  for (std::size_t e = 0; e < static_cast<std::size_t>(m.num_events); ++e) {
    for (std::size_t p = 0; p < static_cast<std::size_t>(m.num_pms); ++p) {
      bool on = m.alpha[e][p] > 0;
      for (std::size_t w = 0; w < m.vms.size() && !on; ++w) {
        on = m.eta[w][e] && x[static_cast<std::size_t>(m.x_index[w][p])] == 1.0;
      }
      x[static_cast<std::size_t>(m.y_index[e][p])] = on ? 1.0 : 0.0;
    }
  }
  return x;
}

HindsightPlan VmMilpPlanner::operator()(const envs::VmClusterEnv&, int t, const envs::ClusterState& pre,
                                        std::span<const envs::VmEvent> suffix) const {
  const auto m = build_vm_milp(pre, t, suffix, mode);
  milp::MilpOptions opts;
  opts.node_budget = node_budget;
  const auto sol = milp::solve_milp(m.problem, opts);
  HindsightPlan plan;
  plan.value = sol.value;
  plan.actions = decode_vm_actions(m, sol.x, suffix);
  plan.exact = sol.exact;
  plan.nodes = sol.nodes;
  plan.bound = sol.bound;
  return plan;
}

}  // namespace hindsight::planners
