#include "hindsight/envs/pandora.hpp"

#include <algorithm>
#include <cmath>

#include "hindsight/core/errors.hpp"

namespace hindsight::envs {

PandoraEnv::PandoraEnv(std::vector<double> caps) : caps_(std::move(caps)) {
  for (double c : caps_) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("Pandora caps must lie in [0, 1]");
  }
}

Transition<PandoraState> PandoraEnv::step(const State& s, Action a, const Input& xi) const {
  if (a != 0 && a != 1) throw InvalidAction("Pandora action must be 0 or 1");
  if (s.accepted == 1) return {State{1}, 0.0};
  if (a == 1) return {State{1}, xi};
  return {State{0}, 0.0};
}

std::vector<double> PandoraEnv::features(const State& s, Action a, int t) const {
  std::vector<double> phi(static_cast<std::size_t>(feature_dim()), 0.0);
  if (t >= 1 && t <= horizon()) phi[static_cast<std::size_t>(t - 1)] = 1.0;
  phi[static_cast<std::size_t>(horizon())] = s.accepted;
  phi[static_cast<std::size_t>(horizon() + 1)] = a;
  phi[static_cast<std::size_t>(horizon() + 2)] = 1.0;
  return phi;
}

std::vector<double> PandoraEnv::sample_trace(CounterRng& rng) const {
  std::vector<double> xs;
  xs.reserve(caps_.size());
  for (double c : caps_) xs.push_back(rng.uniform(0.0, c));
  return xs;
}

double expected_max_of_uniforms(std::vector<double> caps) {
  std::erase_if(caps, [](double c) { return c <= 0.0; });
  if (caps.empty()) return 0.0;
  std::sort(caps.begin(), caps.end());
  const std::size_t n = caps.size();
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // On [prev, caps[k]] the CDFs of caps[k..n-1] are x / c; the rest are 1.
    const double hi = caps[k];
    if (hi <= prev) continue;
    const auto m = static_cast<double>(n - k);
    double denom = 1.0;
    for (std::size_t i = k; i < n; ++i) denom *= caps[i];
    const double integral_of_cdf = (std::pow(hi, m + 1.0) - std::pow(prev, m + 1.0)) / ((m + 1.0) * denom);
    total += (hi - prev) - integral_of_cdf;
    prev = hi;
  }
  return total;
}

double PandoraEnv::expected_max(int from) const {
  if (from > horizon()) return 0.0;
  return expected_max_of_uniforms(std::vector<double>(caps_.begin() + (from - 1), caps_.end()));
}

double PandoraEnv::q_dagger_exact(int t, const State& s, Action a) const {
  if (s.accepted == 1) return 0.0;
  // Accept: E[xi_t]; afterwards nothing is collectable.
  if (a == 1) return mean_input(t);
  // Reject: the hindsight planner accepts the best remaining item.
  return expected_max(t + 1);
}

double PandoraEnv::q_star_exact(int t, const State& s, Action a) const {
  if (s.accepted == 1) return 0.0;
  if (a == 1) return mean_input(t);
  return t < horizon() ? v_star_exact(t + 1, s) : 0.0;
}

double PandoraEnv::v_star_exact(int t, const State& s) const {
  return std::max(q_star_exact(t, s, 0), q_star_exact(t, s, 1));
}

PandoraEnv pandora_env() { return PandoraEnv({1.0, 0.9, 0.9}); }

}  // namespace hindsight::envs
