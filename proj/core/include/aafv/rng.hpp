#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

namespace aafv {

/// Deterministic 64-bit generator (splitmix64). One instance per logical
/// stream; never shared between components.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    std::uint64_t threshold = -n % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    return mag * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

/// Label-keyed seed derivation. Streams for distinct label paths are
/// independent of each other and of the order they are derived in.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t master) : state_(mix(master ^ kInit)) {}

  SeedStream child(std::string_view label) const {
    std::uint64_t h = state_;
    for (char c : label) h = mix(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return SeedStream(h, Tag{});
  }

  SeedStream child(std::uint64_t index) const {
    return SeedStream(mix(state_ ^ mix(index ^ kIndexSalt)), Tag{});
  }

  Rng rng() const { return Rng(mix(state_ ^ kRngSalt)); }

  std::uint64_t value() const { return state_; }

 private:
  struct Tag {};
  SeedStream(std::uint64_t s, Tag) : state_(s) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  }

  static constexpr std::uint64_t kInit = 0x243f6a8885a308d3ULL;
  static constexpr std::uint64_t kIndexSalt = 0x13198a2e03707344ULL;
  static constexpr std::uint64_t kRngSalt = 0xa4093822299f31d0ULL;

  std::uint64_t state_;
};

}  // namespace aafv
