#include "hindsight/learn/forecast.hpp"

#include <cmath>

#include "hindsight/core/errors.hpp"
#include "hindsight/surrogate/surrogate.hpp"

namespace hindsight::learn {

Action ForecastPolicy::act(int t, int x) const {
  const auto& row = q.at(static_cast<std::size_t>(t - 1)).at(static_cast<std::size_t>(x));
  std::vector<Action> acts(row.size());
  for (std::size_t a = 0; a < row.size(); ++a) acts[a] = static_cast<Action>(a);
  return acts[surrogate::argmax_lowest(acts, row)];
}

std::vector<double> empirical_marginal(std::span<const ExoTrace<int>> data, int n_inputs) {
  if (data.empty()) throw EmptyDataset("forecast needs data");
  std::vector<double> p(static_cast<std::size_t>(n_inputs), 0.0);
  double n = 0.0;
  for (const auto& tr : data) {
    for (int xi : tr.inputs()) {
      if (xi < 0 || xi >= n_inputs) throw Error("input symbol out of range");
      p[static_cast<std::size_t>(xi)] += 1.0;
      n += 1.0;
    }
  }
  if (n == 0.0) throw EmptyDataset("forecast needs at least one observed input");
  for (auto& v : p) v /= n;
  return p;
}

ForecastPolicy plan_with_marginal(const envs::TabularEnv& env, const std::vector<double>& p) {
  const int T = env.horizon(), S = env.n_states(), A = env.n_actions();
  if (static_cast<int>(p.size()) != env.n_inputs()) throw DimensionMismatch("marginal size differs from input count");
  ForecastPolicy pi;
  pi.q.assign(static_cast<std::size_t>(T), std::vector<std::vector<double>>(static_cast<std::size_t>(S),
                                                                             std::vector<double>(static_cast<std::size_t>(A), 0.0)));
  pi.v.assign(static_cast<std::size_t>(T) + 1, std::vector<double>(static_cast<std::size_t>(S), 0.0));
  for (int t = T; t >= 1; --t) {
    for (int x = 0; x < S; ++x) {
      auto& qa = pi.q[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(x)];
      for (int a = 0; a < A; ++a) {
        double v = 0.0;
        for (int xi = 0; xi < env.n_inputs(); ++xi) {
          const double w = p[static_cast<std::size_t>(xi)];
          if (w == 0.0) continue;
          v += w * (env.reward(t, x, a, xi) +
                    pi.v[static_cast<std::size_t>(t)][static_cast<std::size_t>(env.next(t, x, a, xi))]);
        }
        qa[static_cast<std::size_t>(a)] = v;
      }
      pi.v[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(x)] = qa[static_cast<std::size_t>(pi.act(t, x))];
    }
  }
  return pi;
}

ForecastPolicy forecast_plan(const envs::TabularEnv& env, std::span<const ExoTrace<int>> data) {
  return plan_with_marginal(env, empirical_marginal(data, env.n_inputs()));
}

double markov_policy_value(const envs::TabularEnv& env, const std::vector<double>& p,
                           const std::vector<std::vector<Action>>& table) {
  const int T = env.horizon(), S = env.n_states();
  std::vector<double> v(static_cast<std::size_t>(S), 0.0);
  for (int t = T; t >= 1; --t) {
    std::vector<double> cur(static_cast<std::size_t>(S), 0.0);
    for (int x = 0; x < S; ++x) {
      const Action a = table[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(x)];
      double total = 0.0;
      for (int xi = 0; xi < env.n_inputs(); ++xi) {
        total += p[static_cast<std::size_t>(xi)] *
                 (env.reward(t, x, a, xi) + v[static_cast<std::size_t>(env.next(t, x, a, xi))]);
      }
      cur[static_cast<std::size_t>(x)] = total;
    }
    v = std::move(cur);
  }
  return v[static_cast<std::size_t>(env.initial_state().x)];
}

std::vector<std::vector<Action>> policy_table(const envs::TabularEnv& env, const ForecastPolicy& pi) {
  std::vector<std::vector<Action>> table(static_cast<std::size_t>(env.horizon()));
  for (int t = 1; t <= env.horizon(); ++t) {
    for (int x = 0; x < env.n_states(); ++x) table[static_cast<std::size_t>(t - 1)].push_back(pi.act(t, x));
  }
  return table;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DimensionMismatch("distributions differ in support size");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace hindsight::learn
