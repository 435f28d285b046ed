#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace steinmetz {

/// splitmix64 step; used to expand user seeds and derive substreams.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** generator seeded by splitmix64 expansion of a 64-bit seed.
///
/// The bit stream, the uniform mapping and the Box-Muller Gaussian are all
/// defined here (no std:: distributions), so draws are identical across
/// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from (seed, name). Init, shuffling and noise
  /// each draw from their own named substream.
  static Rng substream(std::uint64_t seed, std::string_view name);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Fisher-Yates shuffle driven by `rng`.
void shuffle(std::span<std::size_t> items, Rng& rng);

}  // namespace steinmetz
