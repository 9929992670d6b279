#pragma once

#include <cmath>
#include <span>

#include "hindsight/core/errors.hpp"

namespace hindsight {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw EmptyDataset("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance; 0 for a single observation.
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

inline MeanStderr mean_and_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.mean = sample_mean(xs);
  out.stderr_ = std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
  return out;
}

}  // namespace hindsight
