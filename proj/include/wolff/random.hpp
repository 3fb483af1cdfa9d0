#pragma once

// Reproducible random streams. Uniform draws are built from raw 64-bit
// output so that values do not depend on the standard library's
// distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>

namespace wolff {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  // Independent stream for work item `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed) ^ splitmix64(~index));
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  // 2^U with U uniform on [lo_exp, hi_exp].
  double log_uniform2(double lo_exp, double hi_exp) { return std::exp2(uniform(lo_exp, hi_exp)); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace wolff
