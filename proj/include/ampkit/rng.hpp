#pragma once

#include <cstdint>
#include <random>

namespace ampkit {

using Rng = std::mt19937_64;

// splitmix64 step, used to derive independent stream seeds from a base seed
// and a set of indices so that parallel scheduling cannot change results.
inline std::uint64_t mix_seed(std::uint64_t s) {
  s += 0x9e3779b97f4a7c15ULL;
  s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
  s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
  return s ^ (s >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix_seed(base ^ 0x5851f42d4c957f2dULL);
  s = mix_seed(s ^ a);
  s = mix_seed(s ^ (b + 0x9e3779b97f4a7c15ULL));
  s = mix_seed(s ^ (c + 0xda942042e4dd58b5ULL));
  return s;
}

}  // namespace ampkit
