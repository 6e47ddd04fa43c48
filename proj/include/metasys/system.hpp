#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "metasys/milieu.hpp"
#include "metasys/state.hpp"
#include "metasys/update_function.hpp"

namespace metasys {

enum class Schedule {
  SynchronousAll,  // every entity from the frozen time-t snapshot
  LayeredSweep,    // one layer of a layered network per step
};

std::string_view to_string(Schedule schedule);

/// Abstract description of a system before parametrization (virtual regime).
/// The `*_known` flags mark which of phi, M and e(0) are given and which are
/// the subject of a search.
struct SystemSpec {
  StateKind states = StateKind::Boolean;
  std::size_t entities = 0;
  Schedule schedule = Schedule::SynchronousAll;
  bool phi_known = true;
  bool milieu_known = true;
  bool initial_known = true;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

enum class Boundary {
  Periodic,       // rule-table system whose milieu closes into a ring
  Open,           // rule-table system without wrap-around links
  NotApplicable,  // layered networks
};

std::string_view to_string(Boundary boundary);

struct StructuralParameters {
  std::size_t entities = 0;
  StateKind states = StateKind::Boolean;
  EntityTuple initial;
  EntityTuple current;
  std::uint64_t time_step = 0;

  friend bool operator==(const StructuralParameters&, const StructuralParameters&) = default;
};

struct OperationalParameters {
  UpdateFunction phi;
  MilieuMatrix milieu;
  Schedule schedule = Schedule::SynchronousAll;
  Boundary boundary = Boundary::NotApplicable;
  std::vector<std::size_t> milieu_sizes;  // q_i per entity

  friend bool operator==(const OperationalParameters&, const OperationalParameters&) = default;
};

struct Demodulated {
  SystemSpec spec;
  StructuralParameters structural;
  OperationalParameters operational;
};

/// (left, center, right) entity indices feeding a rule-table update.
struct Neighbourhood {
  std::size_t left;
  std::size_t center;
  std::size_t right;

  friend bool operator==(const Neighbourhood&, const Neighbourhood&) = default;
};

/// A fully parametrized system (phi, M, e(0), s) plus its current state.
///
/// Instances are immutable; step() returns a new system. The update function
/// and milieu are shared between copies.
class MetastableSystem {
 public:
  const SystemSpec& spec() const noexcept { return spec_; }
  const UpdateFunction& phi() const noexcept { return bound_->phi; }
  const MilieuMatrix& milieu() const noexcept { return bound_->milieu; }
  const EntityTuple& initial() const noexcept { return initial_; }
  const EntityTuple& current() const noexcept { return current_; }
  std::uint64_t time_step() const noexcept { return t_; }
  std::size_t entities() const noexcept { return spec_.entities; }

  bool is_rule_table() const noexcept { return std::holds_alternative<RuleTable>(phi()); }
  bool is_perceptron() const noexcept { return std::holds_alternative<PerceptronRule>(phi()); }

  /// Resolved (left, center, right) triples; empty for perceptron systems.
  std::span<const Neighbourhood> neighbourhoods() const noexcept {
    return bound_->neighbourhoods;
  }
  /// Number of layers; 0 for rule-table systems.
  std::size_t layers() const noexcept { return bound_->layers; }

  friend bool operator==(const MetastableSystem& a, const MetastableSystem& b);

 private:
  struct Bound {
    UpdateFunction phi;
    MilieuMatrix milieu;
    std::vector<Neighbourhood> neighbourhoods;
    std::size_t layers = 0;
  };

  MetastableSystem() = default;

  friend MetastableSystem modulate(const SystemSpec&, UpdateFunction, MilieuMatrix, EntityTuple);
  friend MetastableSystem modulate(const Demodulated&);
  friend MetastableSystem step(const MetastableSystem&, std::span<const std::size_t>);

  SystemSpec spec_;
  std::shared_ptr<const Bound> bound_;
  EntityTuple initial_;
  EntityTuple current_;
  std::uint64_t t_ = 0;
};

/// Binds phi, M and e(0) to `spec`. The result has t = 0 and current = initial.
/// Throws DimensionMismatch when p, the milieu or phi's arity disagree,
/// StateDomainViolation when the initial state or phi is outside s, and
/// UnsupportedKind for an update/schedule combination that cannot run.
MetastableSystem modulate(const SystemSpec& spec, UpdateFunction phi, MilieuMatrix milieu,
                          EntityTuple initial);

/// Rebuilds a system from its demodulated parts, restoring the current state
/// and time step.
MetastableSystem modulate(const Demodulated& parts);

/// Splits a system into structural (p, s, e) and operational (phi, M,
/// boundary, schedule, q) parameters.
Demodulated demodulate(const MetastableSystem& system);

/// Advances one time step.
MetastableSystem step(const MetastableSystem& system);

/// Same as step(), evaluating entities in the given order. For
/// SynchronousAll the order never changes the result.
MetastableSystem step(const MetastableSystem& system, std::span<const std::size_t> order);

struct Trajectory {
  std::vector<EntityTuple> snapshots;  // snapshots[k] is the state after k steps

  std::size_t size() const noexcept { return snapshots.size(); }
  const EntityTuple& back() const { return snapshots.back(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Applies `steps` steps; the trajectory has steps + 1 snapshots.
Trajectory run(const MetastableSystem& system, std::size_t steps);

/// Streaming variant: calls `visit` with each snapshot, starting at e(0),
/// and returns the final system.
MetastableSystem run(const MetastableSystem& system, std::size_t steps,
                     const std::function<void(const EntityTuple&)>& visit);

}  // namespace metasys
