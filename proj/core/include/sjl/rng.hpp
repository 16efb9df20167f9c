#pragma once

#include <cstdint>

namespace sjl {

// Counter-based generator. The stream is a pure function of
// (seed, stream, substream) and the draw counter, so any draw can be
// reproduced without replaying earlier ones and without shared state between
// workers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
      : key_(mix(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) ^ stream) ^ substream)) {}

  std::uint64_t next() { return mix(key_ ^ mix(counter_++)); }

  // Uniform on [0, n); n must be positive. Rejection keeps it exactly uniform.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  // Uniform on the integers {-w, ..., w}.
  std::int64_t uniform_symmetric(std::uint64_t w) {
    return static_cast<std::int64_t>(uniform_below(2 * w + 1)) -
           static_cast<std::int64_t>(w);
  }

  std::uint64_t draws() const { return counter_; }

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sjl
