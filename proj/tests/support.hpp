#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing in
// the oracles goes through the library's system/step machinery.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "metasys/toolchain.hpp"

namespace testing {

inline const std::string kInitialState = "0000000000000001000000000000000";
inline const std::string kTargetState = "1101011001111101000000000000000";

/// One step of an elementary CA on a string of '0'/'1', periodic boundary.
inline std::string oracle_ca_step(const std::string& s, unsigned rule) {
  const std::size_t p = s.size();
  std::string next(p, '0');
  for (std::size_t i = 0; i < p; ++i) {
    const int l = s[(i + p - 1) % p] - '0';
    const int c = s[i] - '0';
    const int r = s[(i + 1) % p] - '0';
    next[i] = static_cast<char>('0' + ((rule >> (l * 4 + c * 2 + r)) & 1U));
  }
  return next;
}

/// Same CA with the ends clamped: cell -1 reads cell 0, cell p reads p-1.
inline std::string oracle_clamped_step(const std::string& s, unsigned rule) {
  const std::size_t p = s.size();
  std::string next(p, '0');
  for (std::size_t i = 0; i < p; ++i) {
    const int l = s[i == 0 ? 0 : i - 1] - '0';
    const int c = s[i] - '0';
    const int r = s[i + 1 == p ? i : i + 1] - '0';
    next[i] = static_cast<char>('0' + ((rule >> (l * 4 + c * 2 + r)) & 1U));
  }
  return next;
}

inline std::vector<std::string> oracle_ca_run(std::string s, unsigned rule, std::size_t steps) {
  std::vector<std::string> out{s};
  for (std::size_t k = 0; k < steps; ++k) {
    s = oracle_ca_step(s, rule);
    out.push_back(s);
  }
  return out;
}

inline std::string random_bits(std::mt19937_64& rng, std::size_t n) {
  std::string s(n, '0');
  for (auto& c : s) c = static_cast<char>('0' + (rng() & 1U));
  return s;
}

/// Toolchain for tests that build generated programs, from METASYS_TOOLCHAIN
/// (set by the build for ctest runs).
inline std::optional<metasys::ToolchainConfig> test_toolchain() {
  auto c = metasys::toolchain_from_env();
  if (c) c->work_root = std::filesystem::temp_directory_path() / "metasys-tests";
  return c;
}

}  // namespace testing
