#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace detnet {

// Deterministic RNG. mt19937_64 has a standard-mandated output sequence; the
// int/real mappings below are implemented here because the std distribution
// objects are implementation-defined and would break seed reproducibility
// across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed), seed_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const uint64_t span = uint64_t(hi - lo) + 1;
    return lo + int(gen_() % span);
  }

  // Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = size_t(gen_() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent child stream: splitmix64 over (seed, index), so per-item
  // streams are decorrelated from the parent and from each other.
  Rng child(uint64_t index) const {
    uint64_t z = seed_ + (index + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 gen_;
  uint64_t seed_;
};

}  // namespace detnet
