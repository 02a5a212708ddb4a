#ifndef SWSBP_RANDOM_HPP
#define SWSBP_RANDOM_HPP

#include <cstdint>
#include <random>

namespace swsbp {

/// Deterministic uniform generator.  Doubles are derived from the raw 64-bit
/// stream directly, so sequences are reproducible across platforms and
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace swsbp

#endif  // SWSBP_RANDOM_HPP
