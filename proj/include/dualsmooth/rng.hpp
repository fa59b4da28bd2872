#pragma once

#include <cmath>
#include <cstdint>

namespace dualsmooth {

// Seeded splitmix64 stream. Fixed algorithm so fixtures are reproducible
// across platforms; every draw advances the state exactly once.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, two uniforms per draw
  double standard_normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // inverse-CDF Laplace(0, scale)
  double laplace(double scale) {
    const double p = uniform();
    const double q = p - 0.5;
    if (q == 0.0) return 0.0;
    const double s = q > 0.0 ? 1.0 : -1.0;
    return -scale * s * std::log(1.0 - 2.0 * std::abs(q));
  }

 private:
  std::uint64_t state_;
};

}  // namespace dualsmooth
