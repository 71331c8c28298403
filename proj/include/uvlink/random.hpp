#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace uvlink {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a substream key from a master seed and a path of counters, e.g.
/// (seed, {domain, realization, photon}). Keys depend only on the path, so
/// work can be partitioned across threads in any order.
std::uint64_t substream_key(std::uint64_t seed,
                            std::initializer_list<std::uint64_t> path) noexcept;

/// Named substream domains. Values are part of the seeding contract: changing
/// one changes every downstream output.
enum class Domain : std::uint64_t {
  kPhoton = 1,
  kRealization = 2,
  kTemplate = 3,
  kTrace = 4,
  kBerTrials = 5,
  kBenchmark = 6,
};

constexpr std::uint64_t operator+(Domain d) noexcept {
  return static_cast<std::uint64_t>(d);
}

/// xoshiro256++ seeded from a single 64-bit key. Small state, so one instance
/// per photon history is cheap. Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); safe to take the logarithm of.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace uvlink
