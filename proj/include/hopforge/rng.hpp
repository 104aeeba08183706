#pragma once

#include <cstdint>

namespace hopforge {

/// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937_64 +
/// std::uniform_int_distribution because the standard distributions are not
/// bit-reproducible across standard library implementations; every draw here
/// is fully specified, so seeded runs are identical on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Unbiased uniform draw in [0, n). n must be >= 1.
  std::uint64_t uniform_below(std::uint64_t n) {
    // rejection keeps the draw exact: the low 2^64 mod n values are discarded
    std::uint64_t threshold = (~n + 1) % n;
    for (;;) {
      std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-scale, scale).
  double uniform_signed(double scale) { return (2.0 * uniform01() - 1.0) * scale; }

  template <typename T>
  void shuffle(T& v) {
    // Fisher-Yates
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream for (seed, tag). Used wherever generation
/// must be a pure function of a seed and a document id.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  Rng r(seed ^ (tag * 0x9e3779b97f4a7c15ull));
  return r.next_u64();
}

}  // namespace hopforge
