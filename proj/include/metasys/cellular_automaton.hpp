#pragma once

// Elementary (two-state, radius-1, one-dimensional) cellular automata on a
// periodic lattice, expressed through the generic system types.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "metasys/milieu.hpp"
#include "metasys/state.hpp"
#include "metasys/system.hpp"
#include "metasys/update_function.hpp"

namespace metasys::ca {

/// Wolfram rule number in [0, 255].
class RuleNumber {
 public:
  /// Throws OutOfRange outside [0, 255].
  explicit RuleNumber(long value);

  unsigned value() const noexcept { return value_; }

  friend bool operator==(RuleNumber, RuleNumber) = default;
  friend auto operator<=>(RuleNumber, RuleNumber) = default;

 private:
  unsigned value_ = 0;
};

inline constexpr std::size_t kRuleCount = 256;

/// Boolean p x p ring: row i links (i-1 mod p, i, i+1 mod p).
/// Throws TooFewEntities for p < 3.
MilieuMatrix ring_milieu(std::size_t p);

/// Entry (l, c, r) is bit 4l + 2c + r of n.
RuleTable rule_table(RuleNumber n);

inline unsigned ca_update(unsigned left, unsigned center, unsigned right, const RuleTable& table) {
  return table(left, center, right);
}

/// Position k of `text` becomes entity k. Throws BadCharacter for an empty
/// string or any character other than '0'/'1'.
EntityTuple parse_state(std::string_view text);

/// Throws StateDomainViolation for non-Boolean tuples.
std::string format_state(const EntityTuple& state);

/// Resolves the (left, center, right) inputs of every cell from a Boolean
/// milieu. Row i must contain i itself plus at most two other cells. With two
/// others, `left` is the one nearest below i going around the ring and `right`
/// the other; with one other, it is `left` when its index is below i and
/// `right` otherwise; a missing side reads the cell itself.
/// Throws DimensionMismatch when a row cannot feed a three-input rule.
std::vector<Neighbourhood> resolve_neighbourhoods(const MilieuMatrix& milieu);

/// Boolean, synchronous system on a ring of `initial.size()` cells.
MetastableSystem make_system(RuleNumber rule, const EntityTuple& initial);

}  // namespace metasys::ca
