#pragma once

#include <cstdint>

namespace droplet {

// All randomness in the toolkit flows through these generators.  No
// std::*_distribution is used anywhere, so a (seed, stream) pair produces the
// same draws on every platform.

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t s) : state(s) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next() {
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0,1), 53 random bits.
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n); n >= 1.
  std::uint64_t uniform_below(std::uint64_t n) {
    __uint128_t m = (__uint128_t)next() * n;
    auto lo = (std::uint64_t)m;
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = (__uint128_t)next() * n;
        lo = (std::uint64_t)m;
      }
    }
    return (std::uint64_t)(m >> 64);
  }

  bool coin() { return next() >> 63; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

/// Substream derivation: stream `id` of a master seed.  Chains, enumeration
/// workers and bootstrap draws each get their own id, so results do not
/// depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t id) {
  SplitMix64 sm(master_seed ^ (0xA0761D6478BD642FULL * (id + 1)));
  return sm.next();
}

inline Xoshiro256ss derive_stream(std::uint64_t master_seed, std::uint64_t id) {
  return Xoshiro256ss(derive_seed(master_seed, id));
}

}  // namespace droplet
