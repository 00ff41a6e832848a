#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gatenet {

/// Deterministic RNG: std::mt19937_64 engine (bit-exact per the standard)
/// with hand-rolled draws so results never depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  /// Unbiased draw in [0, n). n must be > 0.
  uint64_t uniform(uint64_t n) {
    const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next();
    } while (x >= lim);
    return x % n;
  }

  /// Inclusive range [lo, hi].
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + (int64_t)uniform((uint64_t)(hi - lo) + 1);
  }

  /// [0, 1) with 53 random bits.
  double uniform_real() { return (double)(next() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_real();
  }

  bool bernoulli(double p) { return uniform_real() < p; }

  bool bit() { return (next() >> 63) != 0; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = (size_t)uniform(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[(size_t)uniform(v.size())];
  }

 private:
  std::mt19937_64 eng_;
};

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a 64-bit; used to key sub-seeds by name and to fingerprint configs.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gatenet
