#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace jolt {

// xoshiro256** seeded through splitmix64. All sampling helpers below are
// written out explicitly (no <random> distributions) so that a seed yields
// the same stream on every platform and standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  // Independent stream for (seed, stream id). Used to split one master seed
  // into per-component generators.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ 0x6a09e667f3bcc909ULL;
    std::uint64_t a = splitmix64(s);
    std::uint64_t t = stream + 0xbb67ae8584caa73bULL;
    std::uint64_t b = splitmix64(t);
    return Rng(a ^ (b * 0x9e3779b97f4a7c15ULL));
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    const unsigned __int128 wide = static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::size_t>(wide >> 64);
  }

  // Uniform integer in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
};

// Stream ids used when splitting a master seed.
namespace streams {
inline constexpr std::uint64_t scenario = 1;
inline constexpr std::uint64_t init = 2;
inline constexpr std::uint64_t search = 3;
inline constexpr std::uint64_t neighbors = 4;
inline constexpr std::uint64_t ring = 5;
}  // namespace streams

}  // namespace jolt
