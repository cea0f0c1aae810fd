#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace accel {

// Deterministic random source used by every module.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The distributions below are implemented here rather than taken
// from <random> because the standard leaves those implementation-defined:
//   uniform01()  = (next() >> 11) * 2^-53
//   uniform(a,b) = a + (b - a) * uniform01()
//   below(n)     = next() % n, rejecting draws >= the largest multiple of n
//   normal()     = Box-Muller, cos branch, one pair of uniforms per draw
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

// Independent stream for a labeled purpose: splitmix64 over the seed, an
// FNV-1a hash of the label and the index.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

}  // namespace accel
