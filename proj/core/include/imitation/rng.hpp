#pragma once

#include <cstdint>

namespace imitation {

/// SplitMix64 applied to a (key, counter) pair.
///
/// The n-th draw of a stream is `mix(key + n * golden_gamma)`, so a stream is
/// fully described by its key and position. Streams for independent agents and
/// runs are derived with `derive`, which never touches the parent's counter.
/// Every operation is plain 64-bit integer arithmetic, which keeps replays
/// byte-identical across compilers and hosts.
class CounterRng {
 public:
  static constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

  constexpr CounterRng() = default;
  constexpr explicit CounterRng(std::uint64_t key) : key_(mix(key)) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Child stream keyed by this stream's key and a tag (agent id, run index).
  constexpr CounterRng derive(std::uint64_t tag) const {
    CounterRng child;
    child.key_ = mix(key_ ^ mix(tag + kGoldenGamma));
    return child;
  }

  constexpr std::uint64_t next() {
    ++counter_;
    return mix(key_ + counter_ * kGoldenGamma);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  __extension__ typedef unsigned __int128 wide_t;

  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    wide_t m = static_cast<wide_t>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<wide_t>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace imitation
