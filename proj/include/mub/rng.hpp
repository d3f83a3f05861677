#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mub {

// Seed splitting rule
// -------------------
// Every random decision in a run is drawn from a substream derived from the
// root seed by hashing, never by sharing one generator:
//
//   trial stream   = mix(root, 0xT1) mixed with the trial index
//   user stream    = mix(trial stream, 0xA6) mixed with the user id
//   env stream     = mix(trial stream, 0xE2)
//   point value    = mix(env stream, flat index)   (random-access tensors)
//
// mix() is one splitmix64 step over XORed inputs, so substreams are cheap,
// reproducible, and independent of scheduling order. Trials can therefore run
// in parallel and still produce bit-identical results.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

namespace seed_tag {
constexpr uint64_t trial = 0x745249414c5345ULL;
constexpr uint64_t user = 0x55534552ULL;
constexpr uint64_t env = 0x454e56ULL;
constexpr uint64_t agent_aux = 0x415558ULL;
}  // namespace seed_tag

// Deterministic wrapper around mt19937_64. Distribution mappings are written
// out by hand so output does not depend on the standard library's
// implementation-defined distribution algorithms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

  uint64_t next_u64() { return gen_(); }

  // uniform on [0, 1)
  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

  // uniform integer on [0, n)
  int uniform_int(int n) {
    // rejection-free modulo of a 64-bit draw is fine at these ranges
    return static_cast<int>(gen_() % static_cast<uint64_t>(n));
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal via Box-Muller (no state carried between calls)
  double normal01() {
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // sample an index from a probability vector (cumulative scan)
  int sample_discrete(const std::vector<double>& p) {
    double u = uniform01(), acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

inline uint64_t trial_seed(uint64_t root, long trial) {
  return mix(mix(root, seed_tag::trial), static_cast<uint64_t>(trial));
}
inline uint64_t user_seed(uint64_t trial_s, int user) {
  return mix(mix(trial_s, seed_tag::user), static_cast<uint64_t>(user));
}
inline uint64_t env_seed(uint64_t trial_s) { return mix(trial_s, seed_tag::env); }

}  // namespace mub
