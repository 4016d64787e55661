#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace morisita {

// Mixes a 64-bit value (splitmix64 finalizer). Used to derive independent
// substream seeds from (seed, stream id) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seedable, splittable generator. The raw stream is mt19937_64 (exactly
// specified by the standard); all mappings to doubles are done here rather
// than through std::*_distribution, whose output is implementation-defined.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  // Derives an independent substream; drawing from the child never
  // advances the parent.
  SplitRng split(std::uint64_t stream) const {
    return SplitRng(mix64(seed_ ^ mix64(stream ^ 0xa5a5a5a5a5a5a5a5ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (lo, hi); endpoint draws are redrawn.
  double uniform_open(double lo, double hi) {
    for (;;) {
      double x = lo + (hi - lo) * uniform01();
      if (x > lo && x < hi) return x;
    }
  }

  // Box-Muller; the spare deviate is cached.
  double normal(double mean, double sd) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sd * spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + sd * r * std::cos(theta);
  }

  // Unbiased integer on [0, bound) by rejection.
  std::uint64_t bounded_u64(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded_u64(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace morisita
