#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace unent {

// Error classes, mapped to distinct CLI exit codes.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct refusal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct construction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct check_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG with explicit substream derivation. All experiment code
// draws through this wrapper so results are reproducible from a master seed
// regardless of library version: uniform/normal are implemented here rather
// than via std::..._distribution (whose output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

  // Substream for (seed, i), (seed, i, j), ... Mixing is order-sensitive.
  static Rng substream(std::uint64_t master, std::uint64_t a) {
    return Rng(splitmix64(master) ^ splitmix64(a * 0x9e3779b97f4a7c15ULL + 1));
  }
  static Rng substream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return Rng(splitmix64(splitmix64(master) ^ splitmix64(a + 0x428a2f98d728ae22ULL)) ^
               splitmix64(b * 0x7137449123ef65cdULL + 3));
  }

  std::uint64_t next_u64() { return eng_(); }

  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Wilson 95% score interval for a binomial proportion.
struct WilsonInterval {
  double lower;
  double upper;
};

inline WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = phat + z2 / (2.0 * n);
  double margin = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {(center - margin) / denom, (center + margin) / denom};
}

}  // namespace unent
