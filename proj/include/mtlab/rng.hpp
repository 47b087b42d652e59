#pragma once

#include <cmath>
#include <cstdint>

#include "mtlab/special.hpp"

namespace mtlab {

// splitmix64: tiny, fully specified generator.  Used both as the sample RNG
// and to derive independent per-batch sub-seeds from a master seed, so runs
// are reproducible for any thread count.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in (0,1), never exactly 0 or 1
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() {
    // Box-Muller; one value per call keeps the stream layout simple
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 g(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  g.next_u64();
  return g.next_u64();
}

inline constexpr std::uint64_t default_seed = 0x5EED;

}  // namespace mtlab
