#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dnclab::nn {

// Seeded RNG with hand-rolled distributions. std::*_distribution output is
// implementation-defined, so everything here draws raw bits from mt19937_64
// to keep runs reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t bits() { return eng_(); }

  // uniform in [0, 1)
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  int below(int n) { return int(eng_() % uint64_t(n)); }

  double normal() {
    // Box-Muller; cached second value dropped for simplicity
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(int(xs.size()))];
  }

  template <class T>
  void shuffle(std::vector<T>& xs) {
    for (int i = int(xs.size()) - 1; i > 0; --i) std::swap(xs[i], xs[below(i + 1)]);
  }

 private:
  std::mt19937_64 eng_;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, index): parallel sweeps draw one stream per
// story so serial and concurrent runs agree.
inline uint64_t derive_stream(uint64_t seed, uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (0x517cc1b727220a95ULL * (index + 1)));
}

}  // namespace dnclab::nn
