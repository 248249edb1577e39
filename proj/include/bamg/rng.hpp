/// @file rng.hpp
/// @brief Seeded random streams with a platform-independent real mapping.

#ifndef BAMG_RNG_HPP
#define BAMG_RNG_HPP

#include <cstdint>
#include <random>

#include "bamg/sparse.hpp"

namespace bamg {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) from the top 53 bits of the engine output.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// n values uniform on [-1, 1).
  Vector vector(Index n) {
    Vector v(n);
    for (auto& x : v) x = uniform(-1.0, 1.0);
    return v;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream id.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bamg

#endif  // BAMG_RNG_HPP
