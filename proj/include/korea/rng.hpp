#pragma once

#include <boost/random/mersenne_twister.hpp>

#include <cstdint>
#include <initializer_list>

namespace korea {

/// Boost's engine and distributions produce the same streams on every
/// platform, unlike the std:: distributions.
using Rng = boost::random::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive, platform-stable hash of a small tuple of integers.
inline std::uint64_t stable_hash(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

}  // namespace korea
