#pragma once

#include <cmath>
#include <cstdint>

namespace kgraph {

// Deterministic, stdlib-independent random streams. All randomized code in
// the library draws through this so that (config, seed) pins every output
// bit regardless of platform or thread count.
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64() {
    // splitmix64
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0,1), safe for log()
  double uniform_pos() {
    double u;
    do { u = uniform(); } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  uint64_t below(uint64_t m) { return next_u64() % m; }

  double sign() { return (next_u64() & 1) ? 1.0 : -1.0; }

  double normal() {
    // Box-Muller, one value per call (the spare is dropped to keep the
    // stream position independent of call pairing)
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double cauchy() {
    // ratio of a uniform point in the unit disk; avoids tan() in hot loops
    for (;;) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double s = u * u + v * v;
      if (s <= 1.0 && v != 0.0) return u / v;
    }
  }
};

// Derives an independent stream for (seed, stream id), so parallel workers
// can draw without sharing state and the result is schedule-independent.
inline uint64_t derive_stream(uint64_t seed, uint64_t stream) {
  uint64_t z = seed ^ (0x94d049bb133111ebULL * (stream + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace kgraph
