#pragma once

#include <cstdint>

namespace posmnl {

// SplitMix64 counter generator (Vigna's splitmix64 finalizer over a Weyl
// sequence).  Chosen because the full state/output relation is fixed by this
// header alone: identical seeds give identical streams on every platform and
// toolchain, which the simulation harness relies on for byte-reproducible
// outputs.  Distributions are derived from raw bits below instead of
// <random> adapters, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]: complements next_double so 0 is excluded.
  double next_double_open0() { return 1.0 - next_double(); }

  // Exactly uniform integer on [0, n); n must be positive.  Lemire's
  // multiply-shift with rejection of the biased low slice.
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

// Seed for sub-stream `index` of a master seed.  The avalanche step scatters
// sub-stream states across the full 2^64 Weyl orbit, so streams for different
// replications are not shifted copies of one another.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master ^ (0x9E3779B97F4A7C15ULL * (index + 0x632BE59BD9B4E019ULL));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace posmnl
