#pragma once

#include <cstdint>
#include <limits>

namespace socialopt {

/// Counter-based generator: the k-th output is the SplitMix64 finalizer applied
/// to seed + k * golden_gamma. The whole state is (seed, counter), so streams
/// are reproducible and cheap to fork.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();
  /// Standard normal via Box-Muller (one output per two uniforms, no caching).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Independent stream seed for (seed, stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace socialopt
