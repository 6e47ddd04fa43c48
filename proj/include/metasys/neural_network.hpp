#pragma once

// Multilayer feedforward network of threshold perceptrons. Perceptrons are
// entities, incoming weights live in the milieu matrix, and training applies
// the perceptron learning rule toward a single target tuple.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "metasys/milieu.hpp"
#include "metasys/state.hpp"
#include "metasys/system.hpp"
#include "metasys/update_function.hpp"

namespace metasys::nn {

/// Activation threshold: g(in) = 1 iff in >= 0.5.
inline constexpr double kActivationThreshold = 0.5;

/// L layers of width w. Entity (layer l, position k) has index l*w + k.
/// Weights connect layer l to layer l+1 only; every entity outside the input
/// layer has a bias (its weight from the constant activation a_0 = 1).
struct LayeredTopology {
  std::size_t layers = 0;
  std::size_t width = 0;
  MilieuMatrix weights;       // weighted, (L*w) x (L*w)
  std::vector<double> bias;   // bias[index - width]

  std::size_t entities() const noexcept { return layers * width; }
  std::size_t entity(std::size_t layer, std::size_t position) const noexcept {
    return layer * width + position;
  }

  double& bias_of(std::size_t entity) { return bias.at(entity - width); }
  double bias_of(std::size_t entity) const { return bias.at(entity - width); }

  friend bool operator==(const LayeredTopology&, const LayeredTopology&) = default;
};

/// Fully connected consecutive layers, all weights and biases 0.
/// Throws BadDimensions for L < 2 or w < 1.
LayeredTopology layered_milieu(std::size_t layers, std::size_t width);

/// in_j = bias * a_0 + sum_i w_i * a_i, accumulated in index order.
/// Throws DimensionMismatch when the spans differ in length.
double input_sum(std::span<const double> activations, std::span<const double> weights,
                 double bias);

/// Threshold activation. Throws NonFiniteInput for NaN/inf.
unsigned activate(double in);

/// w' = w + r * (y - a_j) * a_i. The bias uses a_i = 1.
inline double perceptron_update(double weight, double rate, double target, double actual,
                                double incoming) {
  return weight + rate * (target - actual) * incoming;
}

struct ForwardResult {
  EntityTuple output;               // last layer
  std::vector<EntityTuple> layers;  // layers[0] is the clamped input
};

/// Layer-by-layer evaluation. Throws DimensionMismatch if the input width
/// differs from the topology's.
ForwardResult forward(const LayeredTopology& topology, const EntityTuple& input);

struct TrainingConfig {
  double rate = 0.1;
  std::size_t epochs = 200;
  std::size_t budget = 100000;
  double init_low = -1.0;
  double init_high = 1.0;
  TrainingStrategy strategy = TrainingStrategy::OutputLayerOnly;
  /// LayerwiseTargets only: targets for hidden layers 1..L-2, in order.
  /// The output layer trains against the main target.
  std::vector<EntityTuple> layer_targets;
  /// Worker threads for attempt evaluation; the report does not depend on it.
  unsigned threads = 1;
};

/// Throws BadDimensions for an invalid configuration.
void validate(const TrainingConfig& config);

struct TrainingReport {
  std::size_t attempts = 0;
  double best_match = 0.0;
  std::size_t best_attempt = 0;  // 1-based
  LayeredTopology best_network;
  std::vector<double> history;   // final match of each attempt

  bool exact() const noexcept { return best_match == 1.0; }
};

/// Random-restart perceptron training. Each attempt re-draws every weight
/// and bias uniformly from the init range (on the 1e-9 decimal grid), then
/// runs up to `epochs` epochs of the learning rule, stopping the attempt at a
/// perfect output match. Training stops at the first exact attempt or when
/// the budget runs out; the lowest attempt index wins ties.
/// Weights stay on the 1e-9 grid after every update, so trained networks
/// export to text without loss.
TrainingReport train(const LayeredTopology& topology, const EntityTuple& input,
                     const EntityTuple& target, const TrainingConfig& config,
                     std::uint64_t seed);

/// Draws fresh weights and biases for `topology` as attempt `attempt` of a
/// run seeded with `seed` would.
LayeredTopology randomized(const LayeredTopology& topology, const TrainingConfig& config,
                           std::uint64_t seed, std::size_t attempt);

/// One epoch of the output-layer learning rule with hidden layers frozen.
/// Returns the number of output units that were wrong before the update.
std::size_t output_layer_epoch(LayeredTopology& topology, const EntityTuple& input,
                               const EntityTuple& target, double rate);

/// Network as a metastable system: entities hold activations, layer 0 is the
/// input, everything else starts at 0.
MetastableSystem to_system(const LayeredTopology& topology, const EntityTuple& input,
                           Schedule schedule = Schedule::LayeredSweep,
                           TrainingStrategy strategy = TrainingStrategy::OutputLayerOnly);

/// Inverse of to_system's weight placement. Throws UnsupportedKind for
/// non-perceptron systems.
LayeredTopology from_system(const MetastableSystem& system);

}  // namespace metasys::nn
