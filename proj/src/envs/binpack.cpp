#include "hindsight/envs/binpack.hpp"

#include <numeric>

#include "hindsight/core/errors.hpp"

namespace hindsight::envs {

BinPackStep binpack_step(const BinPackState& state, int action, int capacity) {
  const int item = state.pending;
  if (item < 1 || item > capacity) throw Error("bin packing item size out of range: " + std::to_string(item));
  BinPackStep out{state, 0.0};
  out.next.pending = 0;
  if (action == 0) {
    out.next.counts[static_cast<std::size_t>(item - 1)] += 1;
    out.reward = BinPackEnv::kOpenBinReward;
    return out;
  }
  const bool feasible = action > 0 && action <= capacity &&
                        state.counts[static_cast<std::size_t>(action - 1)] > 0 && action + item <= capacity;
  if (!feasible) {
    out.reward = BinPackEnv::kInfeasibleReward;
    return out;
  }
  out.next.counts[static_cast<std::size_t>(action - 1)] -= 1;
  out.next.counts[static_cast<std::size_t>(action + item - 1)] += 1;
  return out;
}

BinPackEnv::BinPackEnv(int capacity, int horizon) : capacity_(capacity), horizon_(horizon) {
  if (capacity < 1) throw ConfigError("bin capacity must be >= 1");
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
}

BinPackEnv::State BinPackEnv::initial_state() const {
  return State{std::vector<int>(static_cast<std::size_t>(capacity_), 0), 0};
}

BinPackEnv::State BinPackEnv::observe(const State& s, const Input& item) const {
  if (item < 1 || item > capacity_) throw Error("bin packing item size out of range: " + std::to_string(item));
  State out = s;
  out.pending = item;
  return out;
}

std::vector<Action> BinPackEnv::actions(const State& s) const {
  std::vector<Action> acts{0};
  for (int a = 1; a + s.pending <= capacity_; ++a) {
    if (s.counts[static_cast<std::size_t>(a - 1)] > 0) acts.push_back(a);
  }
  return acts;
}

Transition<BinPackEnv::State> BinPackEnv::step(const State& s, Action a, const Input&) const {
  auto r = binpack_step(s, a, capacity_);
  return {std::move(r.next), r.reward};
}

int BinPackEnv::feature_dim() const { return horizon_ + (capacity_ + 1) + capacity_ + capacity_ + capacity_ + 2; }

std::vector<double> BinPackEnv::features(const State& s, Action a, int t) const {
  std::vector<double> phi;
  phi.reserve(static_cast<std::size_t>(feature_dim()));
  const double scale = horizon_ > 0 ? static_cast<double>(horizon_) : 1.0;
  for (int k = 1; k <= horizon_; ++k) phi.push_back(k == t ? 1.0 : 0.0);
  for (int k = 0; k <= capacity_; ++k) phi.push_back(k == a ? 1.0 : 0.0);
  for (int c : s.counts) phi.push_back(c / scale);
  for (int u = 1; u <= capacity_; ++u) phi.push_back(u == s.pending ? 1.0 : 0.0);
  const auto post = binpack_step(s, a, capacity_);
  for (int c : post.next.counts) phi.push_back(c / scale);
  const int level = a == 0 ? s.pending : a + s.pending;
  phi.push_back(static_cast<double>(level) / capacity_);
  phi.push_back(a == 0 ? 1.0 : 0.0);
  return phi;
}

std::string BinPackEnv::state_key(const State& s) const {
  std::string key;
  for (int c : s.counts) {
    key += std::to_string(c);
    key += ',';
  }
  key += '|';
  key += std::to_string(s.pending);
  return key;
}

int BinPackEnv::mass(const State& s) {
  int m = 0;
  for (std::size_t u = 0; u < s.counts.size(); ++u) m += static_cast<int>(u + 1) * s.counts[u];
  return m;
}

int BinPackEnv::open_bins(const State& s) { return std::accumulate(s.counts.begin(), s.counts.end(), 0); }

}  // namespace hindsight::envs
