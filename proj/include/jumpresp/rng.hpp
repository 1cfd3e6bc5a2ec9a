#pragma once

#include <cstdint>
#include <random>

#include "jumpresp/types.hpp"

namespace jumpresp {

using Rng = std::mt19937_64;

// Stream identifiers for the independent random sources of one ensemble member.
enum class Stream : std::uint64_t {
  kDiffusion = 1,
  kJumpTimes = 2,
  kJumpSizes = 3,
  kInitial = 4,
  kAuxiliary = 5,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based split: the seed of (stream, member) depends only on the
// master seed and the two counters, never on the order streams are created.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t member = 0) {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(stream)) + member);
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t member = 0) {
  return Rng(derive_seed(master, stream, member));
}

inline void fill_standard_normal(Rng& rng, Vector& out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal(rng);
}

inline Vector standard_normal(Rng& rng, Eigen::Index n) {
  Vector v(n);
  fill_standard_normal(rng, v);
  return v;
}

}  // namespace jumpresp
