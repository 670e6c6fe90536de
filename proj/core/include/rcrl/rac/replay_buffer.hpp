#pragma once

#include <cstdint>
#include <vector>

#include "rcrl/core/environment.hpp"
#include "rcrl/core/rng.hpp"

namespace rcrl::rac {

/// Fixed-capacity ring of transitions. Once full, the oldest entry is
/// overwritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void Add(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  /// `batch` indices drawn uniformly with replacement.
  std::vector<std::size_t> SampleIndices(std::size_t batch, CounterRng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

}  // namespace rcrl::rac
