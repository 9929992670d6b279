#pragma once

#include <cstdint>
#include <vector>

namespace hindsight::harness {

/// Trace indices of each part, in shuffled order.
struct DatasetSplit {
  std::vector<std::size_t> train, validation, test;
};

/// Shuffles 0..n-1 with `seed`; the first floor(train_frac * n) go to
/// training and the remainder is halved, validation taking the smaller half.
/// Throws ConfigError for fewer than three traces, an empty training set or
/// an empty test set.
DatasetSplit split_dataset(std::size_t n, double train_frac, std::uint64_t seed);

}  // namespace hindsight::harness
