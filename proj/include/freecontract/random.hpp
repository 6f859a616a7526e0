#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fc::rng {

// Every random stream is std::mt19937_64 seeded with
//   splitmix64(seed ^ splitmix64(stream + 1))
// so a single user seed fans out into independent, reproducible streams
// indexed by (seed, stream).
inline constexpr std::string_view kGeneratorName =
    "mt19937_64/splitmix64-split/v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(derive_seed(seed, index));
}

}  // namespace fc::rng
