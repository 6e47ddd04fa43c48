#pragma once

#include <cstdint>
#include <random>

namespace metasys {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for attempt `index` of a run started with `master`. Attempts can be
/// evaluated in any order, or concurrently, and see the same randomness.
constexpr std::uint64_t attempt_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 attempt_engine(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(attempt_seed(master, index));
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform
/// (std::uniform_real_distribution is not).
inline double canonical_double(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Seed for an unseeded run.
std::uint64_t fresh_seed();

}  // namespace metasys
