#include "hindsight/learn/objectives.hpp"

#include <cmath>

#include "hindsight/core/errors.hpp"

namespace hindsight::learn {

namespace {

std::vector<double> scores_of(const neural::Mlp& net, const std::vector<std::vector<double>>& features) {
  std::vector<double> s;
  s.reserve(features.size());
  for (const auto& f : features) s.push_back(net.forward(f));
  return s;
}

/// Adds coef * dH/dscore_a to `dscore` for H = -sum p log p; returns H.
double add_entropy(const std::vector<double>& p, double coef, std::vector<double>& dscore) {
  double h = 0.0;
  for (double q : p) {
    if (q > 0.0) h -= q * std::log(q);
  }
  if (coef != 0.0) {
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double lp = p[a] > 0.0 ? std::log(p[a]) : 0.0;
      dscore[a] += coef * (-p[a] * (lp + h));
    }
  }
  return h;
}

}  // namespace

Objective mac_objective(const neural::Mlp& net, std::span<const QLabelRecord> batch, double entropy_coef) {
  if (batch.empty()) throw EmptyDataset("empty batch");
  Objective out{0.0, std::vector<double>(net.num_params(), 0.0)};
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& rec : batch) {
    if (rec.features.size() != rec.labels.size() || rec.labels.empty()) {
      throw DimensionMismatch("label record needs one label per action row");
    }
    const auto p = neural::softmax(scores_of(net, rec.features));
    double mean_q = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) mean_q += p[a] * rec.labels[a];
    // d/dscore_a sum_b p_b Q_b = p_a (Q_a - sum_b p_b Q_b)
    std::vector<double> dscore(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) dscore[a] = p[a] * (rec.labels[a] - mean_q);
    const double h = add_entropy(p, entropy_coef, dscore);
    out.value += w * (mean_q + entropy_coef * h);
    for (std::size_t a = 0; a < p.size(); ++a) net.accumulate_gradient(rec.features[a], w * dscore[a], out.grad);
  }
  return out;
}

Objective qdistill_objective(const neural::Mlp& net, std::span<const QLabelRecord> batch) {
  if (batch.empty()) throw EmptyDataset("empty batch");
  Objective out{0.0, std::vector<double>(net.num_params(), 0.0)};
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& rec : batch) {
    if (rec.features.size() != rec.labels.size() || rec.labels.empty()) {
      throw DimensionMismatch("label record needs one label per action row");
    }
    const double wa = w / static_cast<double>(rec.labels.size());
    for (std::size_t a = 0; a < rec.labels.size(); ++a) {
      const double err = net.forward(rec.features[a]) - rec.labels[a];
      out.value += wa * err * err;
      net.accumulate_gradient(rec.features[a], wa * 2.0 * err, out.grad);
    }
  }
  return out;
}

Objective pg_objective(const neural::Mlp& net, std::span<const PgSample> batch, double entropy_coef) {
  if (batch.empty()) throw EmptyDataset("empty batch");
  Objective out{0.0, std::vector<double>(net.num_params(), 0.0)};
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& smp : batch) {
    const auto n = smp.features.size();
    if (smp.taken < 0 || static_cast<std::size_t>(smp.taken) >= n) throw DimensionMismatch("taken index out of range");
    const auto p = neural::softmax(scores_of(net, smp.features));
    const auto k = static_cast<std::size_t>(smp.taken);
    // d log p_k / d score_a = [a == k] - p_a
    std::vector<double> dscore(n);
    for (std::size_t a = 0; a < n; ++a) dscore[a] = smp.advantage * ((a == k ? 1.0 : 0.0) - p[a]);
    const double h = add_entropy(p, entropy_coef, dscore);
    out.value += w * (smp.advantage * std::log(p[k]) + entropy_coef * h);
    for (std::size_t a = 0; a < n; ++a) net.accumulate_gradient(smp.features[a], w * dscore[a], out.grad);
  }
  return out;
}

Objective squared_error(const neural::Mlp& net, std::span<const Regression> batch) {
  if (batch.empty()) throw EmptyDataset("empty batch");
  Objective out{0.0, std::vector<double>(net.num_params(), 0.0)};
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& r : batch) {
    const double err = net.forward(r.features) - r.target;
    out.value += w * err * err;
    net.accumulate_gradient(r.features, w * 2.0 * err, out.grad);
  }
  return out;
}

}  // namespace hindsight::learn
