#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metasys {

/// The set `s` of admissible entity states.
enum class StateKind {
  Boolean,  // {0, 1}
  Real,     // finite doubles
};

std::string_view to_string(StateKind kind);

bool in_state_set(StateKind kind, double value) noexcept;

/// Ordered states of the p entities of a system at one time step.
///
/// Values are stored as doubles for both kinds; Boolean tuples hold exactly
/// 0.0 or 1.0. Construction validates membership in the declared state set.
class EntityTuple {
 public:
  EntityTuple() = default;
  /// Throws StateDomainViolation if a value is outside `kind`.
  EntityTuple(StateKind kind, std::vector<double> values);

  static EntityTuple zeros(StateKind kind, std::size_t p);

  StateKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Throws StateDomainViolation if `value` is outside the state set.
  void set(std::size_t i, double value);

  friend bool operator==(const EntityTuple&, const EntityTuple&) = default;

 private:
  StateKind kind_ = StateKind::Boolean;
  std::vector<double> values_;
};

/// Absolute tolerance for comparing Real states.
inline constexpr double kRealMatchTolerance = 1e-9;

/// Fraction of positions where `a` and `b` agree, in [0, 1].
/// Boolean states compare exactly; Real states within `tolerance`.
/// Throws DimensionMismatch on differing lengths or kinds.
double match(const EntityTuple& a, const EntityTuple& b,
             double tolerance = kRealMatchTolerance);

/// Canonical trajectory line: Boolean tuples as a '0'/'1' string, Real
/// tuples as space-separated 9-decimal values.
std::string format_state_line(const EntityTuple& state);

/// Inverse of format_state_line. Throws BadCharacter for malformed text.
EntityTuple parse_state_line(std::string_view line, StateKind kind);

/// Fixed 9-decimal rendering used for weights, real states and scores.
std::string format_decimal(double value);

/// Parses a decimal number; returns false on malformed or non-finite text.
bool parse_decimal(std::string_view text, double& out);

/// Nearest double to the 9-decimal rendering of `value`; the values that
/// survive a textual round trip unchanged.
double quantize_decimal(double value);

}  // namespace metasys
