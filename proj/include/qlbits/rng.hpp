#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qlbits {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a, used to turn a block label into a stream id.
constexpr std::uint64_t stream_id(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-block seed derived from a single run seed. Distinct streams give
/// statistically independent generators.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return derive_seed(seed, stream_id(label));
}

}  // namespace qlbits
