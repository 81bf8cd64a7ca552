// Deterministic xoroshiro128+ stream with Box-Muller gaussian draws.
// Every random decision in the library flows through this type, so a run is
// reproducible bit-for-bit from its seeds on any platform.
#pragma once

#include <cmath>
#include <cstdint>

namespace cloudopt {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    s0_ = detail::splitmix64(sm);
    s1_ = detail::splitmix64(sm);
    if (s0_ == 0 && s1_ == 0) s1_ = 0x9e3779b97f4a7c15ULL;
  }

  std::uint64_t next() {
    const std::uint64_t s0 = s0_;
    std::uint64_t s1 = s1_;
    const std::uint64_t result = s0 + s1;
    s1 ^= s0;
    s0_ = rotl(s0, 24) ^ s1 ^ (s1 << 16);
    s1_ = rotl(s1, 37);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Standard normal via Box-Muller; consumes two words, keeps no spare.
  double gaussian() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s0_, s1_;
};

}  // namespace cloudopt
