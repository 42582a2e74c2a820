#pragma once

#include <cstdint>
#include <limits>

namespace unifilar {

/// Counter-based generator: the n-th draw is a pure function of
/// (seed, stream, n). Replication r of a run uses stream r, so results do not
/// depend on how replications are split across threads.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Index drawn from a probability vector; the last positive entry absorbs
  /// rounding.
  int categorical(const double* probs, int size);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

}  // namespace unifilar
