#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/rng.hpp"

namespace hindsight::learn {

/// Fixed-capacity ring with FIFO eviction and uniform sampling with
/// replacement.
template <class T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("buffer capacity must be positive");
  }

  void append(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
    ++appended_;
  }

  std::vector<T> sample(std::size_t n, CounterRng& rng) {
    if (items_.empty()) throw EmptyDataset("sampling from an empty buffer");
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(items_[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(items_.size()) - 1))]);
    }
    sampled_ += n;
    return out;
  }

  /// Items oldest first.
  std::vector<T> contents() const {
    std::vector<T> out;
    out.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) out.push_back(items_[(head_ + i) % items_.size()]);
    return out;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t appended() const { return appended_; }
  std::uint64_t sampled() const { return sampled_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t capacity_;
  std::vector<T> items_;
  std::size_t head_ = 0;  // oldest item once full
  std::uint64_t appended_ = 0;
  std::uint64_t sampled_ = 0;
};

}  // namespace hindsight::learn
