#include "hindsight/envs/inventory.hpp"

#include <algorithm>

#include "hindsight/core/errors.hpp"

namespace hindsight::envs {

InventoryStep inventory_step(const InventoryState& state, int order, int demand, const InventoryParams& params) {
  if (order < 0 || order > params.max_order) throw InvalidAction("order quantity out of range");
  if (static_cast<int>(state.pipeline.size()) != params.lead_time) throw Error("pipeline length must equal lead time");
  InventoryStep out;
  int level = state.on_hand;
  out.next.pipeline = state.pipeline;
  if (params.lead_time == 0) {
    level += order;
  } else {
    level += state.pipeline.front();
    std::rotate(out.next.pipeline.begin(), out.next.pipeline.begin() + 1, out.next.pipeline.end());
    out.next.pipeline.back() = order;
  }
  const int surplus = std::max(level - demand, 0);
  const int shortfall = std::max(demand - level, 0);
  out.reward = -(params.holding * surplus + params.lost_sale * shortfall);
  out.next.on_hand = surplus;
  return out;
}

InventoryEnv::InventoryEnv(InventoryParams params, InventoryState initial)
    : params_(params), initial_(std::move(initial)) {
  if (params_.lead_time < 0) throw ConfigError("lead time must be >= 0");
  if (params_.max_order < 0) throw ConfigError("max order must be >= 0");
  if (params_.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (initial_.pipeline.empty()) initial_.pipeline.assign(static_cast<std::size_t>(params_.lead_time), 0);
  if (static_cast<int>(initial_.pipeline.size()) != params_.lead_time) {
    throw ConfigError("initial pipeline length must equal lead time");
  }
}

std::vector<Action> InventoryEnv::actions(const State&) const {
  std::vector<Action> acts(static_cast<std::size_t>(params_.max_order + 1));
  for (int a = 0; a <= params_.max_order; ++a) acts[static_cast<std::size_t>(a)] = a;
  return acts;
}

Transition<InventoryEnv::State> InventoryEnv::step(const State& s, Action a, const Input& demand) const {
  auto r = inventory_step(s, a, demand, params_);
  return {std::move(r.next), r.reward};
}

RewardRange InventoryEnv::reward_range() const {
  const double worst = std::max(params_.holding, params_.lost_sale) * 2.0 * params_.max_order;
  return {-worst, 0.0};
}

std::vector<double> InventoryEnv::features(const State& s, Action a, int t) const {
  const double scale = params_.max_order > 0 ? params_.max_order : 1.0;
  std::vector<double> phi;
  phi.reserve(static_cast<std::size_t>(feature_dim()));
  phi.push_back(s.on_hand / scale);
  for (int o : s.pipeline) phi.push_back(o / scale);
  phi.push_back(a / scale);
  phi.push_back(params_.horizon > 0 ? static_cast<double>(t) / params_.horizon : 0.0);
  phi.push_back(1.0);
  return phi;
}

std::string InventoryEnv::state_key(const State& s) const {
  std::string key = std::to_string(s.on_hand);
  for (int o : s.pipeline) key += "," + std::to_string(o);
  return key;
}

}  // namespace hindsight::envs
