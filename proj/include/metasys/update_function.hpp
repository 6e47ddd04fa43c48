#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace metasys {

/// Elementary CA truth table. Entry b = 4*left + 2*center + right holds the
/// next state of the center cell for that neighbourhood.
struct RuleTable {
  std::array<std::uint8_t, 8> outputs{};

  std::uint8_t operator()(unsigned left, unsigned center, unsigned right) const {
    return outputs[4 * left + 2 * center + right];
  }

  /// Wolfram number whose bit b equals outputs[b].
  unsigned number() const noexcept;

  friend bool operator==(const RuleTable&, const RuleTable&) = default;
};

enum class TrainingStrategy {
  OutputLayerOnly,
  LayerwiseTargets,
};

std::string_view to_string(TrainingStrategy strategy);

/// Threshold-perceptron update for a layered network of `width`-wide layers.
/// Entities [0, width) form the input layer and are never updated; every
/// other entity j computes g(bias[j - width] + sum_i M(j, i) * a_i).
/// The incoming weights live in the (weighted) milieu matrix.
struct PerceptronRule {
  std::size_t width = 0;
  std::vector<double> bias;  // one per non-input entity
  TrainingStrategy strategy = TrainingStrategy::OutputLayerOnly;

  friend bool operator==(const PerceptronRule&, const PerceptronRule&) = default;
};

/// phi: s^(q+1) -> s.
using UpdateFunction = std::variant<RuleTable, PerceptronRule>;

}  // namespace metasys
