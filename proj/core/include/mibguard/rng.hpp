#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mibguard {

// Deterministic random helpers on top of std::mt19937. The standard pins the
// mt19937 output sequence but not the distribution adaptors, so the adaptors
// here are hand-rolled: identical seeds give identical streams everywhere.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}

  std::uint32_t next_u32() { return gen_(); }

  // Unbiased integer in [0, bound); bound must be > 0.
  std::uint32_t below(std::uint32_t bound) {
    // Reject the low 2^32 mod bound values so every residue is equally likely.
    const std::uint32_t threshold = static_cast<std::uint32_t>(-bound) % bound;
    for (;;) {
      const std::uint32_t r = gen_();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in (0, 1), never exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(gen_()) + 0.5) * 0x1p-32;
  }

  // Standard normal via Box-Muller (cosine branch only).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(static_cast<std::uint32_t>(i))]);
    }
  }

 private:
  static constexpr double kTwoPi = 6.28318530717958647692;
  std::mt19937 gen_;
};

}  // namespace mibguard
