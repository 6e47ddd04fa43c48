#include "metasys/neural_network.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "metasys/error.hpp"
#include "metasys/parallel.hpp"
#include "metasys/random.hpp"

namespace metasys::nn {

namespace {

/// Dense working copy used during training: weights[(layer-1)][j][k] is the
/// weight from position k of layer-1 into position j of layer.
struct DenseNet {
  std::size_t layers = 0;
  std::size_t width = 0;
  std::vector<double> weights;  // (L-1) * w * w
  std::vector<double> bias;     // (L-1) * w

  std::span<double> incoming(std::size_t layer, std::size_t j) {
    return {weights.data() + ((layer - 1) * width + j) * width, width};
  }
  std::span<const double> incoming(std::size_t layer, std::size_t j) const {
    return {weights.data() + ((layer - 1) * width + j) * width, width};
  }
  double& bias_of(std::size_t layer, std::size_t j) { return bias[(layer - 1) * width + j]; }
  double bias_of(std::size_t layer, std::size_t j) const {
    return bias[(layer - 1) * width + j];
  }
};

void check_dims(std::size_t layers, std::size_t width) {
  if (layers < 2 || width < 1) {
    throw Error(ErrorCode::BadDimensions, "a layered network needs L >= 2 and w >= 1, got L = " +
                                              std::to_string(layers) +
                                              ", w = " + std::to_string(width));
  }
}

DenseNet to_dense(const LayeredTopology& t) {
  DenseNet d;
  d.layers = t.layers;
  d.width = t.width;
  d.weights.assign((t.layers - 1) * t.width * t.width, 0.0);
  d.bias = t.bias;
  for (std::size_t layer = 1; layer < t.layers; ++layer) {
    for (std::size_t j = 0; j < t.width; ++j) {
      auto in = d.incoming(layer, j);
      for (const MilieuEntry& e : t.weights.row(t.entity(layer, j))) {
        in[e.source - (layer - 1) * t.width] = e.weight;
      }
    }
  }
  return d;
}

LayeredTopology from_dense(const DenseNet& d) {
  LayeredTopology t = layered_milieu(d.layers, d.width);
  t.bias = d.bias;
  for (std::size_t layer = 1; layer < d.layers; ++layer) {
    for (std::size_t j = 0; j < d.width; ++j) {
      const auto in = d.incoming(layer, j);
      for (std::size_t k = 0; k < d.width; ++k) {
        t.weights.set(t.entity(layer, j), t.entity(layer - 1, k), in[k]);
      }
    }
  }
  return t;
}

/// activations[layer * w + k]; layers [0, upto] are filled.
void propagate(const DenseNet& net, std::vector<double>& activations, std::size_t from,
               std::size_t upto) {
  const std::size_t w = net.width;
  for (std::size_t layer = from; layer <= upto; ++layer) {
    const std::span<const double> below(activations.data() + (layer - 1) * w, w);
    for (std::size_t j = 0; j < w; ++j) {
      activations[layer * w + j] =
          activate(input_sum(below, net.incoming(layer, j), net.bias_of(layer, j)));
    }
  }
}

std::size_t wrong_outputs(const std::vector<double>& activations, std::size_t layer,
                          std::size_t w, const EntityTuple& target) {
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < w; ++j) wrong += activations[layer * w + j] != target[j];
  return wrong;
}

/// Applies the learning rule to every unit of `layer` against `target`,
/// using the activations currently in `activations`.
void learn_layer(DenseNet& net, const std::vector<double>& activations, std::size_t layer,
                 const EntityTuple& target, double rate) {
  const std::size_t w = net.width;
  const double* below = activations.data() + (layer - 1) * w;
  for (std::size_t j = 0; j < w; ++j) {
    const double y = target[j];
    const double a = activations[layer * w + j];
    if (y == a) continue;
    auto in = net.incoming(layer, j);
    for (std::size_t k = 0; k < w; ++k) {
      in[k] = quantize_decimal(perceptron_update(in[k], rate, y, a, below[k]));
    }
    double& b = net.bias_of(layer, j);
    b = quantize_decimal(perceptron_update(b, rate, y, a, 1.0));
  }
}

DenseNet random_dense(std::size_t layers, std::size_t width, const TrainingConfig& config,
                      std::uint64_t seed, std::size_t attempt) {
  auto engine = attempt_engine(seed, attempt);
  DenseNet d;
  d.layers = layers;
  d.width = width;
  const double span = config.init_high - config.init_low;
  const auto draw = [&] { return quantize_decimal(config.init_low + span * canonical_double(engine)); };
  d.weights.resize((layers - 1) * width * width);
  for (double& v : d.weights) v = draw();
  d.bias.resize((layers - 1) * width);
  for (double& v : d.bias) v = draw();
  return d;
}

struct AttemptResult {
  double match = 0.0;
  DenseNet net;
};

AttemptResult run_attempt(std::size_t layers, std::size_t width, const EntityTuple& input,
                          const EntityTuple& target, const TrainingConfig& config,
                          std::uint64_t seed, std::size_t attempt) {
  AttemptResult r;
  r.net = random_dense(layers, width, config, seed, attempt);
  DenseNet& net = r.net;
  const std::size_t w = width;
  const std::size_t out = layers - 1;
  std::vector<double> act(layers * w, 0.0);
  for (std::size_t k = 0; k < w; ++k) act[k] = input[k];

  if (config.strategy == TrainingStrategy::OutputLayerOnly) {
    // Hidden layers are frozen, so their activations are computed once.
    if (out > 1) propagate(net, act, 1, out - 1);
    propagate(net, act, out, out);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      if (wrong_outputs(act, out, w, target) == 0) break;
      learn_layer(net, act, out, target, config.rate);
      propagate(net, act, out, out);
    }
  } else {
    propagate(net, act, 1, out);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      if (wrong_outputs(act, out, w, target) == 0) break;
      for (std::size_t layer = 1; layer <= out; ++layer) {
        const EntityTuple& y = layer == out ? target : config.layer_targets[layer - 1];
        learn_layer(net, act, layer, y, config.rate);
      }
      propagate(net, act, 1, out);
    }
  }
  std::vector<double> output(act.begin() + static_cast<std::ptrdiff_t>(out * w), act.end());
  r.match = metasys::match(EntityTuple(target.kind(), std::move(output)), target);
  return r;
}

}  // namespace

LayeredTopology layered_milieu(std::size_t layers, std::size_t width) {
  check_dims(layers, width);
  LayeredTopology t;
  t.layers = layers;
  t.width = width;
  t.weights = MilieuMatrix(MilieuKind::Weighted, layers * width);
  t.bias.assign((layers - 1) * width, 0.0);
  for (std::size_t layer = 1; layer < layers; ++layer) {
    for (std::size_t j = 0; j < width; ++j) {
      for (std::size_t k = 0; k < width; ++k) {
        t.weights.set(t.entity(layer, j), t.entity(layer - 1, k), 0.0);
      }
    }
  }
  return t;
}

double input_sum(std::span<const double> activations, std::span<const double> weights,
                 double bias) {
  if (activations.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "input_sum: " + std::to_string(activations.size()) + " activations, " +
                    std::to_string(weights.size()) + " weights");
  }
  double in = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) in += weights[i] * activations[i];
  return in;
}

unsigned activate(double in) {
  if (!std::isfinite(in)) throw Error(ErrorCode::NonFiniteInput, "activation input is not finite");
  return in >= kActivationThreshold ? 1U : 0U;
}

ForwardResult forward(const LayeredTopology& topology, const EntityTuple& input) {
  check_dims(topology.layers, topology.width);
  if (input.size() != topology.width) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has " + std::to_string(input.size()) + " values, layer width is " +
                    std::to_string(topology.width));
  }
  const std::size_t w = topology.width;
  ForwardResult result;
  result.layers.reserve(topology.layers);
  result.layers.push_back(input);
  std::vector<double> weights;
  std::vector<double> below;
  for (std::size_t layer = 1; layer < topology.layers; ++layer) {
    const EntityTuple& prev = result.layers.back();
    std::vector<double> next(w, 0.0);
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t i = topology.entity(layer, j);
      weights.clear();
      below.clear();
      for (const MilieuEntry& e : topology.weights.row(i)) {
        weights.push_back(e.weight);
        below.push_back(prev[e.source - (layer - 1) * w]);
      }
      next[j] = activate(input_sum(below, weights, topology.bias_of(i)));
    }
    result.layers.emplace_back(input.kind(), std::move(next));
  }
  result.output = result.layers.back();
  return result;
}

void validate(const TrainingConfig& config) {
  if (!(config.rate >= 0.0) || !std::isfinite(config.rate)) {
    throw Error(ErrorCode::BadDimensions, "learning rate must be finite and >= 0");
  }
  if (config.epochs < 1) throw Error(ErrorCode::BadDimensions, "epochs must be >= 1");
  if (config.budget < 1) throw Error(ErrorCode::BadDimensions, "attempt budget must be >= 1");
  if (!(config.init_low < config.init_high)) {
    throw Error(ErrorCode::BadDimensions, "weight init range must be non-empty");
  }
}

LayeredTopology randomized(const LayeredTopology& topology, const TrainingConfig& config,
                           std::uint64_t seed, std::size_t attempt) {
  check_dims(topology.layers, topology.width);
  return from_dense(random_dense(topology.layers, topology.width, config, seed, attempt));
}

std::size_t output_layer_epoch(LayeredTopology& topology, const EntityTuple& input,
                               const EntityTuple& target, double rate) {
  const auto fwd = forward(topology, input);
  if (target.size() != topology.width) {
    throw Error(ErrorCode::DimensionMismatch, "target width differs from layer width");
  }
  const std::size_t out = topology.layers - 1;
  std::vector<double> act;
  act.reserve(topology.entities());
  for (const auto& layer : fwd.layers) act.insert(act.end(), layer.values().begin(), layer.values().end());
  DenseNet net = to_dense(topology);
  const std::size_t wrong = wrong_outputs(act, out, topology.width, target);
  learn_layer(net, act, out, target, rate);
  topology = from_dense(net);
  return wrong;
}

TrainingReport train(const LayeredTopology& topology, const EntityTuple& input,
                     const EntityTuple& target, const TrainingConfig& config,
                     std::uint64_t seed) {
  check_dims(topology.layers, topology.width);
  validate(config);
  const std::size_t w = topology.width;
  if (input.size() != w || target.size() != w) {
    throw Error(ErrorCode::DimensionMismatch,
                "input and target must have the layer width " + std::to_string(w));
  }
  if (target.kind() != StateKind::Boolean) {
    throw Error(ErrorCode::StateDomainViolation, "perceptron targets are bits");
  }
  if (config.strategy == TrainingStrategy::LayerwiseTargets) {
    if (config.layer_targets.size() != topology.layers - 2) {
      throw Error(ErrorCode::DimensionMismatch,
                  "layerwise training needs " + std::to_string(topology.layers - 2) +
                      " hidden-layer targets, got " + std::to_string(config.layer_targets.size()));
    }
    for (const auto& t : config.layer_targets) {
      if (t.size() != w || t.kind() != StateKind::Boolean) {
        throw Error(ErrorCode::DimensionMismatch, "hidden-layer targets must be width-w bits");
      }
    }
  }

  TrainingReport report;
  report.history.reserve(std::min<std::size_t>(config.budget, 1024));
  bool have_best = false;
  DenseNet best;
  const std::size_t batch = config.threads <= 1 ? 1 : std::size_t{config.threads} * 4;
  std::size_t next = 0;
  while (next < config.budget) {
    const std::size_t count = std::min(batch, config.budget - next);
    auto results = evaluate_batch<AttemptResult>(next, count, config.threads, [&](std::size_t k) {
      return run_attempt(topology.layers, w, input, target, config, seed, k);
    });
    for (std::size_t k = 0; k < count; ++k) {
      AttemptResult& r = results[k];
      report.history.push_back(r.match);
      report.attempts = next + k + 1;
      if (!have_best || r.match > report.best_match) {
        have_best = true;
        report.best_match = r.match;
        report.best_attempt = next + k + 1;
        best = std::move(r.net);
      }
      if (report.best_match == 1.0) {
        report.best_network = from_dense(best);
        return report;
      }
    }
    next += count;
  }
  report.best_network = from_dense(best);
  return report;
}

MetastableSystem to_system(const LayeredTopology& topology, const EntityTuple& input,
                           Schedule schedule, TrainingStrategy strategy) {
  check_dims(topology.layers, topology.width);
  if (input.size() != topology.width) {
    throw Error(ErrorCode::DimensionMismatch, "input width differs from layer width");
  }
  SystemSpec spec;
  spec.states = input.kind();
  spec.entities = topology.entities();
  spec.schedule = schedule;
  std::vector<double> init(topology.entities(), 0.0);
  for (std::size_t k = 0; k < input.size(); ++k) init[k] = input[k];
  PerceptronRule rule{topology.width, topology.bias, strategy};
  return modulate(spec, std::move(rule), topology.weights,
                  EntityTuple(input.kind(), std::move(init)));
}

LayeredTopology from_system(const MetastableSystem& system) {
  const auto* rule = std::get_if<PerceptronRule>(&system.phi());
  if (!rule) throw Error(ErrorCode::UnsupportedKind, "not a perceptron system");
  LayeredTopology t;
  t.layers = system.layers();
  t.width = rule->width;
  t.weights = system.milieu();
  t.bias = rule->bias;
  return t;
}

}  // namespace metasys::nn
