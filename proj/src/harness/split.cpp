#include "hindsight/harness/split.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/rng.hpp"

namespace hindsight::harness {

DatasetSplit split_dataset(std::size_t n, double train_frac, std::uint64_t seed) {
  if (n < 3) throw ConfigError("a split needs at least 3 traces, got " + std::to_string(n));
  if (!(train_frac > 0.0 && train_frac <= 1.0)) throw ConfigError("train_frac must lie in (0, 1]");
  const auto n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n) + 1e-9));
  const std::size_t rest = n - n_train;
  const std::size_t n_val = rest / 2;
  if (n_train == 0) throw ConfigError("train_frac leaves the training set empty");
  if (rest - n_val == 0) throw ConfigError("train_frac leaves the test set empty");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  CounterRng rng(seed);
  rng.shuffle(idx);
  DatasetSplit s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                      idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
  return s;
}

}  // namespace hindsight::harness
