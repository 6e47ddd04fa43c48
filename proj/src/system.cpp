#include "metasys/system.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "metasys/cellular_automaton.hpp"
#include "metasys/error.hpp"
#include "metasys/neural_network.hpp"

namespace metasys {

std::string_view to_string(Schedule schedule) {
  return schedule == Schedule::SynchronousAll ? "synchronous" : "layered";
}

std::string_view to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::Periodic: return "periodic";
    case Boundary::Open: return "open";
    case Boundary::NotApplicable: return "none";
  }
  return "none";
}

std::string_view to_string(TrainingStrategy strategy) {
  return strategy == TrainingStrategy::OutputLayerOnly ? "output-layer-only" : "layerwise-targets";
}

unsigned RuleTable::number() const noexcept {
  unsigned n = 0;
  for (unsigned b = 0; b < 8; ++b) n |= static_cast<unsigned>(outputs[b] & 1U) << b;
  return n;
}

namespace {

[[noreturn]] void mismatch(const std::string& what) {
  throw Error(ErrorCode::DimensionMismatch, what);
}

std::size_t check_perceptron(const PerceptronRule& rule, const MilieuMatrix& milieu,
                             std::size_t p) {
  if (milieu.kind() != MilieuKind::Weighted) {
    mismatch("perceptron update needs a weighted milieu");
  }
  if (rule.width == 0 || p % rule.width != 0 || p / rule.width < 2) {
    mismatch("perceptron width " + std::to_string(rule.width) +
             " does not split " + std::to_string(p) + " entities into >= 2 layers");
  }
  if (rule.bias.size() != p - rule.width) {
    mismatch("perceptron needs " + std::to_string(p - rule.width) + " biases, got " +
             std::to_string(rule.bias.size()));
  }
  for (double b : rule.bias) {
    if (!in_state_set(StateKind::Real, b)) {
      throw Error(ErrorCode::StateDomainViolation, "bias must be finite");
    }
  }
  const std::size_t w = rule.width;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t layer = i / w;
    for (const MilieuEntry& e : milieu.row(i)) {
      if (layer == 0 || e.source / w != layer - 1) {
        mismatch("weight into entity " + std::to_string(i) + " from entity " +
                 std::to_string(e.source) + " does not join consecutive layers");
      }
    }
  }
  return p / w;
}

Boundary boundary_of(const MetastableSystem& s) {
  if (!s.is_rule_table()) return Boundary::NotApplicable;
  const std::size_t p = s.entities();
  for (std::size_t i = 0; i < p; ++i) {
    const Neighbourhood& n = s.neighbourhoods()[i];
    if (n.left != (i + p - 1) % p || n.right != (i + 1) % p) return Boundary::Open;
  }
  return Boundary::Periodic;
}

double evaluate(const MetastableSystem& s, const EntityTuple& frozen, std::size_t i) {
  if (const auto* table = std::get_if<RuleTable>(&s.phi())) {
    const Neighbourhood& n = s.neighbourhoods()[i];
    return ca::ca_update(frozen[n.left] != 0.0, frozen[n.center] != 0.0, frozen[n.right] != 0.0,
                         *table);
  }
  const auto& rule = std::get<PerceptronRule>(s.phi());
  double in = rule.bias[i - rule.width];
  for (const MilieuEntry& e : s.milieu().row(i)) in += e.weight * frozen[e.source];
  try {
    return nn::activate(in);
  } catch (const Error&) {
    throw Error(ErrorCode::UpdateDomainViolation,
                "entity " + std::to_string(i) + " received a non-finite input");
  }
}

}  // namespace

bool operator==(const MetastableSystem& a, const MetastableSystem& b) {
  return a.spec_ == b.spec_ && a.t_ == b.t_ && a.initial_ == b.initial_ &&
         a.current_ == b.current_ &&
         (a.bound_ == b.bound_ ||
          (a.bound_->phi == b.bound_->phi && a.bound_->milieu == b.bound_->milieu));
}

MetastableSystem modulate(const SystemSpec& spec, UpdateFunction phi, MilieuMatrix milieu,
                          EntityTuple initial) {
  const std::size_t p = spec.entities;
  if (p == 0) mismatch("a system needs at least one entity");
  if (milieu.dimension() != p) {
    mismatch("milieu is " + std::to_string(milieu.dimension()) + "x" +
             std::to_string(milieu.dimension()) + " but p = " + std::to_string(p));
  }
  if (initial.size() != p) {
    mismatch("initial state has " + std::to_string(initial.size()) + " entities but p = " +
             std::to_string(p));
  }
  if (initial.kind() != spec.states) {
    throw Error(ErrorCode::StateDomainViolation,
                "initial state is " + std::string(to_string(initial.kind())) +
                    " but the system's state set is " + std::string(to_string(spec.states)));
  }

  auto bound = std::make_shared<MetastableSystem::Bound>();
  if (const auto* table = std::get_if<RuleTable>(&phi)) {
    if (spec.states != StateKind::Boolean) {
      throw Error(ErrorCode::StateDomainViolation, "rule tables act on Boolean states");
    }
    if (spec.schedule != Schedule::SynchronousAll) {
      throw Error(ErrorCode::UnsupportedKind, "rule-table systems update synchronously");
    }
    for (auto bit : table->outputs) {
      if (bit > 1) throw Error(ErrorCode::StateDomainViolation, "rule table outputs are bits");
    }
    if (milieu.kind() != MilieuKind::Boolean) mismatch("rule tables need a Boolean milieu");
    bound->neighbourhoods = ca::resolve_neighbourhoods(milieu);
  } else {
    bound->layers = check_perceptron(std::get<PerceptronRule>(phi), milieu, p);
  }
  bound->phi = std::move(phi);
  bound->milieu = std::move(milieu);

  MetastableSystem s;
  s.spec_ = spec;
  s.bound_ = std::move(bound);
  s.current_ = initial;
  s.initial_ = std::move(initial);
  s.t_ = 0;
  return s;
}

MetastableSystem modulate(const Demodulated& parts) {
  const auto& st = parts.structural;
  if (st.entities != parts.spec.entities || st.states != parts.spec.states ||
      parts.operational.schedule != parts.spec.schedule) {
    mismatch("structural parameters disagree with the system spec");
  }
  if (st.current.size() != st.entities || st.current.kind() != st.states) {
    mismatch("current state does not match p and s");
  }
  MetastableSystem s = modulate(parts.spec, parts.operational.phi, parts.operational.milieu,
                                st.initial);
  s.current_ = st.current;
  s.t_ = st.time_step;
  return s;
}

Demodulated demodulate(const MetastableSystem& system) {
  Demodulated d;
  d.spec = system.spec();
  d.structural.entities = system.entities();
  d.structural.states = system.spec().states;
  d.structural.initial = system.initial();
  d.structural.current = system.current();
  d.structural.time_step = system.time_step();
  d.operational.phi = system.phi();
  d.operational.milieu = system.milieu();
  d.operational.schedule = system.spec().schedule;
  d.operational.boundary = boundary_of(system);
  d.operational.milieu_sizes.reserve(system.entities());
  for (std::size_t i = 0; i < system.entities(); ++i) {
    d.operational.milieu_sizes.push_back(system.milieu().milieu_size(i));
  }
  return d;
}

MetastableSystem step(const MetastableSystem& system) {
  std::vector<std::size_t> order(system.entities());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return step(system, order);
}

MetastableSystem step(const MetastableSystem& system, std::span<const std::size_t> order) {
  const std::size_t p = system.entities();
  if (order.size() != p) mismatch("evaluation order must list every entity once");

  // Entities this step may change.
  std::size_t lo = 0;
  std::size_t hi = p;
  if (system.is_perceptron()) {
    const std::size_t w = std::get<PerceptronRule>(system.phi()).width;
    if (system.spec().schedule == Schedule::LayeredSweep) {
      const std::size_t layer = system.time_step() % (system.layers() - 1) + 1;
      lo = layer * w;
      hi = lo + w;
    } else {
      lo = w;
    }
  }

  const EntityTuple& frozen = system.current();
  std::vector<double> next(frozen.values().begin(), frozen.values().end());
  std::vector<bool> seen(p, false);
  for (std::size_t i : order) {
    if (i >= p || seen[i]) mismatch("evaluation order must list every entity once");
    seen[i] = true;
    if (i < lo || i >= hi) continue;
    const double v = evaluate(system, frozen, i);
    if (!in_state_set(system.spec().states, v)) {
      throw Error(ErrorCode::UpdateDomainViolation,
                  "update of entity " + std::to_string(i) + " left the state set");
    }
    next[i] = v;
  }

  MetastableSystem out = system;
  out.current_ = EntityTuple(system.spec().states, std::move(next));
  ++out.t_;
  return out;
}

Trajectory run(const MetastableSystem& system, std::size_t steps) {
  Trajectory trajectory;
  trajectory.snapshots.reserve(steps + 1);
  run(system, steps, [&](const EntityTuple& s) { trajectory.snapshots.push_back(s); });
  return trajectory;
}

MetastableSystem run(const MetastableSystem& system, std::size_t steps,
                     const std::function<void(const EntityTuple&)>& visit) {
  MetastableSystem s = system;
  visit(s.current());
  for (std::size_t k = 0; k < steps; ++k) {
    s = step(s);
    visit(s.current());
  }
  return s;
}

}  // namespace metasys
