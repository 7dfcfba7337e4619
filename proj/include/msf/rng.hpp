#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace msf {

/// SplitMix64 finalizer. Used as the mixing function for seed derivation so
/// that parallel work items can draw from independent, scheduling-free
/// streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a base seed and one salt. The derivation is a
/// hash-combine with a SplitMix64 finalizer: documented, platform-independent
/// and stable across runs, so any work item (cell, trial, task) can be given
/// its own stream regardless of worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(base ^ (splitmix64(salt) + 0x9e3779b97f4a7c15ULL +
                            (base << 6) + (base >> 2)));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

/// Seeded random stream: mt19937_64 engine with explicitly implemented
/// uniform and gaussian draws, so the produced sequences depend only on this
/// code and the engine, not on standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal draw via the Marsaglia polar method (pairs cached).
  double gaussian() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cache_ = v * m;
    has_cache_ = true;
    return u * m;
  }

  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

}  // namespace msf
