#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hindsight/neural/mlp.hpp"

namespace hindsight::learn {

/// Oracle labels for every feasible action at one visited state.
struct QLabelRecord {
  int t = 0;
  std::vector<std::vector<double>> features;  // one row per feasible action
  std::vector<double> labels;                 // Q-dagger_t(s_t, a, xi_{>=t})
  std::uint64_t trace_id = 0;
  bool exact = true;
};

struct Objective {
  double value = 0.0;
  std::vector<double> grad;  // gradient of `value` w.r.t. the parameters
};

/// Mean over records of sum_a pi_theta(a|s) Q(s,a), plus entropy_coef times
/// the mean policy entropy. Gradient is of this (to be maximised).
Objective mac_objective(const neural::Mlp& net, std::span<const QLabelRecord> batch, double entropy_coef = 0.0);

/// Mean over records of the per-record mean of (Q_theta(s,a) - Q(s,a))^2.
/// Gradient is of this loss (to be minimised).
Objective qdistill_objective(const neural::Mlp& net, std::span<const QLabelRecord> batch);

/// One sampled decision for score-function updates.
struct PgSample {
  std::vector<std::vector<double>> features;
  int taken = 0;  // index into features
  double advantage = 0.0;
};

/// Mean over samples of A log pi_theta(taken|s) plus entropy_coef times the
/// mean entropy. Gradient is of this (to be maximised).
Objective pg_objective(const neural::Mlp& net, std::span<const PgSample> batch, double entropy_coef = 0.0);

/// One regression target for a scalar network output.
struct Regression {
  std::vector<double> features;
  double target = 0.0;
};

/// Mean of (net(x) - target)^2 with gradient (critics, Q-learning).
Objective squared_error(const neural::Mlp& net, std::span<const Regression> batch);

}  // namespace hindsight::learn
