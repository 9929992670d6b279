#include "hindsight/neural/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/rng.hpp"

namespace hindsight::neural {

namespace {

constexpr const char* kMagic = "HLMLP";
constexpr int kVersion = 1;

}  // namespace

Mlp::Mlp(int input_dim, std::vector<int> hidden, double slope) : slope_(slope) {
  if (input_dim < 1) throw DimensionMismatch("network input dimension must be >= 1");
  dims_.push_back(input_dim);
  for (int h : hidden) {
    if (h < 1) throw DimensionMismatch("hidden layer widths must be >= 1");
    dims_.push_back(h);
  }
  dims_.push_back(1);
  layout();
}

void Mlp::layout() {
  offsets_.clear();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(n);
    n += static_cast<std::size_t>(dims_[l + 1]) * static_cast<std::size_t>(dims_[l] + 1);
  }
  params_.assign(n, 0.0);
}

Mlp Mlp::glorot(int input_dim, std::vector<int> hidden, std::uint64_t seed, double slope) {
  Mlp net(input_dim, std::move(hidden), slope);
  CounterRng rng(seed);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const int fan_in = net.dims_[l], fan_out = net.dims_[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    const std::size_t w0 = net.weight_offset(l);
    for (std::size_t i = 0; i < static_cast<std::size_t>(fan_in * fan_out); ++i) {
      net.params_[w0 + i] = rng.uniform(-limit, limit);
    }
  }
  return net;
}

double Mlp::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw DimensionMismatch("feature vector has " + std::to_string(x.size()) + " entries, network expects " +
                            std::to_string(input_dim()));
  }
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const auto in = static_cast<std::size_t>(dims_[l]);
    const auto out = static_cast<std::size_t>(dims_[l + 1]);
    const double* W = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    std::vector<double> z(out);
    for (std::size_t i = 0; i < out; ++i) {
      double s = b[i];
      for (std::size_t j = 0; j < in; ++j) s += W[i * in + j] * a[j];
      z[i] = (l + 1 < num_layers() && s < 0.0) ? slope_ * s : s;
    }
    a = std::move(z);
  }
  return a[0];
}

void Mlp::accumulate_gradient(std::span<const double> x, double upstream, std::vector<double>& grad) const {
  if (static_cast<int>(x.size()) != input_dim()) throw DimensionMismatch("feature vector dimension mismatch");
  if (grad.size() != params_.size()) throw DimensionMismatch("gradient buffer has the wrong size");
  if (upstream == 0.0) return;
  // Forward pass keeping activations and pre-activations.
  std::vector<std::vector<double>> acts{std::vector<double>(x.begin(), x.end())};
  std::vector<std::vector<double>> pre;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const auto in = static_cast<std::size_t>(dims_[l]);
    const auto out = static_cast<std::size_t>(dims_[l + 1]);
    const double* W = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    std::vector<double> z(out), a(out);
    for (std::size_t i = 0; i < out; ++i) {
      double s = b[i];
      for (std::size_t j = 0; j < in; ++j) s += W[i * in + j] * acts[l][j];
      z[i] = s;
      a[i] = (l + 1 < num_layers() && s < 0.0) ? slope_ * s : s;
    }
    pre.push_back(std::move(z));
    acts.push_back(std::move(a));
  }
  // Backward pass.
  std::vector<double> delta{upstream};
  for (std::size_t l = num_layers(); l-- > 0;) {
    const auto in = static_cast<std::size_t>(dims_[l]);
    const auto out = static_cast<std::size_t>(dims_[l + 1]);
    if (l + 1 < num_layers()) {
      for (std::size_t i = 0; i < out; ++i) {
        if (pre[l][i] < 0.0) delta[i] *= slope_;
      }
    }
    const double* W = params_.data() + weight_offset(l);
    double* gW = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    std::vector<double> below(in, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      gb[i] += delta[i];
      for (std::size_t j = 0; j < in; ++j) {
        gW[i * in + j] += delta[i] * acts[l][j];
        below[j] += W[i * in + j] * delta[i];
      }
    }
    delta = std::move(below);
  }
}

std::vector<double> Mlp::backward(std::span<const double> x, double upstream) const {
  std::vector<double> grad(params_.size(), 0.0);
  accumulate_gradient(x, upstream, grad);
  return grad;
}

// Checkpoint layout (text, one token per whitespace gap):
//   HLMLP 1
//   <num dims> <dim_0> ... <dim_k>
//   <slope>
//   <num params> <p_0> ... <p_n-1>     (17 significant digits, layer order)
void Mlp::save(std::ostream& out) const {
  out << kMagic << ' ' << kVersion << '\n' << dims_.size();
  for (int d : dims_) out << ' ' << d;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", slope_);
  out << '\n' << buf << '\n' << params_.size() << '\n';
  for (std::size_t i = 0; i < params_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", params_[i]);
    out << buf << ((i + 1) % 8 == 0 || i + 1 == params_.size() ? '\n' : ' ');
  }
}

Mlp Mlp::load(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic || version != kVersion) {
    throw ParseError("not a version-1 network checkpoint");
  }
  std::size_t n_dims = 0;
  if (!(in >> n_dims) || n_dims < 2) throw ParseError("bad checkpoint dimensions");
  Mlp net;
  net.dims_.resize(n_dims);
  for (auto& d : net.dims_) {
    if (!(in >> d) || d < 1) throw ParseError("bad checkpoint dimension");
  }
  if (net.dims_.back() != 1) throw ParseError("checkpoint output dimension must be 1");
  if (!(in >> net.slope_)) throw ParseError("bad checkpoint slope");
  net.layout();
  std::size_t n = 0;
  if (!(in >> n) || n != net.params_.size()) throw ParseError("checkpoint parameter count mismatch");
  for (auto& p : net.params_) {
    if (!(in >> p)) throw ParseError("truncated checkpoint");
  }
  return net;
}

void Mlp::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save(out);
}

Mlp Mlp::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  return load(in);
}

std::vector<double> masked_softmax(std::span<const double> scores, const std::vector<bool>& mask) {
  if (mask.size() != scores.size()) throw DimensionMismatch("mask size differs from score count");
  double top = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask[i]) {
      top = std::max(top, scores[i]);
      any = true;
    }
  }
  if (!any) throw NoFeasibleAction("softmax over an empty feasible set");
  std::vector<double> p(scores.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask[i]) z += p[i] = std::exp(scores[i] - top);
  }
  for (auto& v : p) v /= z;
  return p;
}

std::vector<double> softmax(std::span<const double> scores) {
  return masked_softmax(scores, std::vector<bool>(scores.size(), true));
}

std::vector<double> policy_probs(const Mlp& net, const std::vector<std::vector<double>>& features) {
  std::vector<double> scores;
  scores.reserve(features.size());
  for (const auto& f : features) scores.push_back(net.forward(f));
  return softmax(scores);
}

void RmsProp::step(std::vector<double>& params, std::span<const double> grad) {
  if (grad.size() != params.size()) throw DimensionMismatch("gradient size differs from parameter count");
  if (second_moment.size() != params.size()) second_moment.assign(params.size(), 0.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!std::isfinite(grad[i])) throw NumericalError("non-finite gradient entry");
    second_moment[i] = decay * second_moment[i] + (1.0 - decay) * grad[i] * grad[i];
    params[i] -= lr * grad[i] / std::sqrt(second_moment[i] + eps);
    if (!std::isfinite(params[i])) throw NumericalError("parameter diverged");
  }
}

}  // namespace hindsight::neural
