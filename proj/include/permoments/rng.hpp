#pragma once

#include <cstdint>
#include <random>

namespace permoments {

// Default seed used whenever the caller does not pick one.
inline constexpr std::uint64_t kDefaultSeed = 20100517;

// Seedable 64-bit generator split into independent streams. Stream i of a
// seed is a Mersenne Twister initialised through std::seed_seq from the four
// 32-bit halves of (seed, i), so the sequence is fixed by (seed, stream).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed, std::uint64_t stream = 0);

  // A generator for another stream of the same seed.
  Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Poisson(mean) by sequential inversion of the CDF; meant for small means.
  int poisson(double mean);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace permoments
