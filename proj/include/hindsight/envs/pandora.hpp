#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hindsight/core/exo_mdp.hpp"
#include "hindsight/core/rng.hpp"

namespace hindsight::envs {

/// accepted = 1 is absorbing.
struct PandoraState {
  int accepted = 0;
  friend bool operator==(const PandoraState&, const PandoraState&) = default;
};

/// Box-opening counterexample: item t has value xi_t ~ U[0, caps[t-1]],
/// unseen before deciding. a = 1 accepts the next item (reward xi, move to
/// the absorbing state), a = 0 rejects it.
class PandoraEnv {
 public:
  using State = PandoraState;
  using Input = double;
  static constexpr bool kRevealsCurrentInput = false;

  explicit PandoraEnv(std::vector<double> caps);

  int horizon() const { return static_cast<int>(caps_.size()); }
  const std::vector<double>& caps() const { return caps_; }
  State initial_state() const { return {}; }
  State observe(const State& s, const Input&) const { return s; }
  std::vector<Action> actions(const State&) const { return {0, 1}; }
  Transition<State> step(const State& s, Action a, const Input& xi) const;
  RewardRange reward_range() const { return {0.0, 1.0}; }
  std::string state_key(const State& s) const { return std::to_string(s.accepted); }

  int feature_dim() const { return horizon() + 3; }
  std::vector<double> features(const State& s, Action a, int t) const;

  /// One trace with xi_t ~ U[0, caps[t-1]].
  std::vector<double> sample_trace(CounterRng& rng) const;

  // Closed forms (exact-expectation mode).
  double mean_input(int t) const { return caps_.at(static_cast<std::size_t>(t - 1)) / 2.0; }
  /// E[max(xi_from, ..., xi_T)]; 0 when from > T.
  double expected_max(int from) const;
  /// Q-dagger_t(s, a) with the expectation evaluated analytically.
  double q_dagger_exact(int t, const State& s, Action a) const;
  /// Q-star_t(s, a) by backward induction on the means.
  double q_star_exact(int t, const State& s, Action a) const;
  double v_star_exact(int t, const State& s) const;

 private:
  std::vector<double> caps_;
};

/// The three-step instance: xi_1 ~ U[0,1], xi_2, xi_3 ~ U[0,0.9].
PandoraEnv pandora_env();

/// E[max_i U_i] for independent U_i ~ U[0, c_i], integrated exactly piecewise.
double expected_max_of_uniforms(std::vector<double> caps);

}  // namespace hindsight::envs
