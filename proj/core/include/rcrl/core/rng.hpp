#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace rcrl {

// Counter-based generator: output i is a bijective mix of (key, i), so a
// stream can be split into independent children without sharing state.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) : key_(Mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return Mix(key_ + kGolden * ++counter_); }

  /// Child stream identified by an integer tag. Does not advance this stream.
  CounterRng Split(std::uint64_t stream) const {
    CounterRng child;
    child.key_ = Mix(key_ ^ Mix(stream + 0x9e3779b97f4a7c15ULL));
    return child;
  }

  /// Child stream identified by a name (FNV-1a of the name).
  CounterRng Split(std::string_view name) const {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : name) {
      hash ^= static_cast<unsigned char>(c);
      hash *= 0x100000001b3ULL;
    }
    return Split(hash);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace rcrl
