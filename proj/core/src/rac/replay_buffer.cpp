#include "rcrl/rac/replay_buffer.hpp"

#include <stdexcept>

namespace rcrl::rac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be > 0");
  items_.reserve(capacity);
}

void ReplayBuffer::Add(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::SampleIndices(std::size_t batch, CounterRng& rng) const {
  if (items_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
  std::vector<std::size_t> idx(batch);
  // Multiply-shift keeps the draw portable across standard libraries.
  const unsigned __int128 n = items_.size();
  for (std::size_t& i : idx) i = static_cast<std::size_t>((n * rng()) >> 64);
  return idx;
}

}  // namespace rcrl::rac
