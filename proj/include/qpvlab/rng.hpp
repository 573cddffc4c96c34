#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qpvlab {

using Bits = std::vector<std::uint8_t>;

/// SplitMix64 finalizer; used only to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// SplitMix64 stream (Steele, Lea and Flood): state advances by the golden
/// gamma and each output is the splitmix64 finalizer of the state. Satisfies
/// UniformRandomBitGenerator. Seeding is O(1), which matters because every
/// Monte-Carlo trial gets a fresh generator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    const std::uint64_t s = state_;
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64(s);
  }

 private:
  std::uint64_t state_;
};

/// Seedable, portable 64-bit generator.
///
/// Output is fully specified by the SplitMix64 recurrence above. Floating-point
/// draws use the top 53 bits of the raw output, so results do not depend on
/// the standard library's distribution classes.
///
/// Stream splitting: trial i of a run seeded with S uses
///   Rng(splitmix64(S ^ splitmix64(i + 1)))
/// so serial and parallel executions draw identical per-trial streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_trial(std::uint64_t seed, std::uint64_t trial);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }
  Bits bits(std::size_t n);
  /// Index drawn from a discrete distribution; `probs` need not be normalized exactly.
  std::size_t sample(std::span<const double> probs);

 private:
  SplitMix64 engine_;
};

}  // namespace qpvlab
