#pragma once

#include <cstdint>
#include <random>

namespace uwbpos {

using Rng = std::mt19937_64;

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Turns (master seed, work-unit indices) into a well-separated stream seed.
// Chained mixing keeps the derivation order-sensitive, so (a,b) and (b,a)
// name different streams.
constexpr uint64_t derive_seed(uint64_t master, uint64_t a = 0, uint64_t b = 0,
                               uint64_t c = 0) {
  uint64_t s = splitmix64(master);
  s = splitmix64(s ^ splitmix64(a));
  s = splitmix64(s ^ splitmix64(b));
  s = splitmix64(s ^ splitmix64(c));
  return s;
}

inline Rng make_stream(uint64_t master, uint64_t a = 0, uint64_t b = 0,
                       uint64_t c = 0) {
  return Rng(derive_seed(master, a, b, c));
}

// Gaussian draw; a non-positive stddev degenerates to the mean without
// consuming randomness.
inline double draw_normal(Rng& rng, double mean, double stddev) {
  if (stddev <= 0.0) return mean;
  std::normal_distribution<double> dist(mean, stddev);
  return dist(rng);
}

}  // namespace uwbpos
