#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hindsight::neural {

/// Fully connected scorer in -> h_1 -> ... -> h_k -> 1 with LeakyReLU on the
/// hidden layers and a linear output. All weights and biases live in one
/// flat vector: for each layer, W (out x in, row-major) then b (out).
class Mlp {
 public:
  static constexpr double kDefaultSlope = 0.01;

  Mlp() = default;
  /// Zero-initialised network.
  Mlp(int input_dim, std::vector<int> hidden, double slope = kDefaultSlope);

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Mlp glorot(int input_dim, std::vector<int> hidden, std::uint64_t seed, double slope = kDefaultSlope);
  /// The scoring network used for action-dependent features: 32 -> 16 -> 8.
  static Mlp scorer(int input_dim, std::uint64_t seed) { return glorot(input_dim, {32, 16, 8}, seed); }

  int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  const std::vector<int>& dims() const { return dims_; }
  double slope() const { return slope_; }
  std::size_t num_params() const { return params_.size(); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  double forward(std::span<const double> x) const;
  /// d(upstream * score) / d(params) at input x.
  std::vector<double> backward(std::span<const double> x, double upstream) const;
  /// Accumulates upstream * d score / d params into `grad`.
  void accumulate_gradient(std::span<const double> x, double upstream, std::vector<double>& grad) const;

  /// Offsets of layer l's weights and biases inside params().
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(dims_[layer + 1] * dims_[layer]);
  }
  std::size_t num_layers() const { return dims_.size() - 1; }

  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);
  void save_file(const std::string& path) const;
  static Mlp load_file(const std::string& path);

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  void layout();

  std::vector<int> dims_;
  double slope_ = kDefaultSlope;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

/// Masked softmax: probabilities over `scores` with mask[i] = false forced to
/// exactly 0. Throws NoFeasibleAction if nothing is unmasked.
std::vector<double> masked_softmax(std::span<const double> scores, const std::vector<bool>& mask);
/// Softmax over every entry (all feasible).
std::vector<double> softmax(std::span<const double> scores);

/// pi_theta(. | s) from per-action feature vectors (feasible actions only).
std::vector<double> policy_probs(const Mlp& net, const std::vector<std::vector<double>>& features);

struct RmsProp {
  double lr = 1e-3;
  double decay = 0.99;
  double eps = 1e-8;
  std::vector<double> second_moment;

  /// v <- decay v + (1 - decay) g^2; p <- p - lr g / sqrt(v + eps).
  void step(std::vector<double>& params, std::span<const double> grad);
};

}  // namespace hindsight::neural
