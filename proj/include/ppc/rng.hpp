#pragma once

#include <cmath>
#include <cstdint>

namespace ppc {

// Deterministic, platform-independent random number generator
// (splitmix64 state advance, Box-Muller normals).  std:: distributions are
// implementation-defined, which would break the bit-identical reruns the
// bootstrap requires.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t next_index(std::uint64_t n) { return next_u64() % n; }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Independent stream for replicate `index` of a master seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed ^ (0xA0761D6478BD642FULL * (index + 1)));
    mix.next_u64();
    return mix.next_u64();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ppc
