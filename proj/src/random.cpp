#include "metasys/random.hpp"

#include <chrono>

namespace metasys {

std::uint64_t fresh_seed() {
  std::random_device device;
  const std::uint64_t hi = device();
  const std::uint64_t lo = device();
  const auto now = static_cast<std::uint64_t>(
      std::chrono::steady_clock::now().time_since_epoch().count());
  return mix64((hi << 32) ^ lo ^ now);
}

}  // namespace metasys
