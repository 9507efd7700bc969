#pragma once

#include <cstdint>
#include <initializer_list>

namespace radarnet {

/// Mixes several integers into one 64-bit RNG seed (splitmix64 chain).
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (std::uint64_t part : parts) {
    state ^= part + 0x9E3779B97F4A7C15ull + (state << 6) + (state >> 2);
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    state = z ^ (z >> 31);
  }
  return state;
}

}  // namespace radarnet
