#pragma once

#include <cstdint>
#include <vector>

namespace psp {

/// Deterministic pseudo-random stream built on the splitmix64 sequence
/// (Steele, Lea & Flood 2014): the state advances by the 64-bit golden
/// ratio and each output is the finalizer mix of the new state. The
/// algorithm is pure integer arithmetic, so identical seeds produce
/// identical streams on every platform, independent of the C++ standard
/// library in use.
///
/// A SeededRng is single-owner. Parallel or order-independent work must
/// derive child streams via child(), never share one instance.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform angle in [-pi, pi).
  double angle();

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so draws come in deterministic order within one stream.
  double normal();

  /// -1.0 or +1.0 with equal probability.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Unbiased integer in [0, n) by rejection sampling. n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::int32_t> permutation(std::int32_t n);

  /// Independent stream derived from (seed, stream id). Children with
  /// distinct ids are decorrelated regardless of the order they are made,
  /// which keeps parallel trial loops reproducible.
  SeededRng child(std::uint64_t stream) const {
    return SeededRng(mix64(seed_ ^ mix64(stream + 0x632BE59BD9B4E019ULL)));
  }

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace psp
