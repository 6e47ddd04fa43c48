#include "metasys/cellular_automaton.hpp"

#include <string>

#include "metasys/error.hpp"

namespace metasys::ca {

RuleNumber::RuleNumber(long value) {
  if (value < 0 || value > 255) {
    throw Error(ErrorCode::OutOfRange,
                "rule number " + std::to_string(value) + " outside [0, 255]");
  }
  value_ = static_cast<unsigned>(value);
}

MilieuMatrix ring_milieu(std::size_t p) {
  if (p < 3) {
    throw Error(ErrorCode::TooFewEntities,
                "a ring needs at least 3 cells, got " + std::to_string(p));
  }
  MilieuMatrix m(MilieuKind::Boolean, p);
  for (std::size_t i = 0; i < p; ++i) {
    m.set(i, (i + p - 1) % p);
    m.set(i, i);
    m.set(i, (i + 1) % p);
  }
  return m;
}

RuleTable rule_table(RuleNumber n) {
  RuleTable table;
  for (unsigned b = 0; b < 8; ++b) {
    table.outputs[b] = static_cast<std::uint8_t>((n.value() >> b) & 1U);
  }
  return table;
}

EntityTuple parse_state(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::BadCharacter, "empty state string");
  return parse_state_line(text, StateKind::Boolean);
}

std::string format_state(const EntityTuple& state) {
  if (state.kind() != StateKind::Boolean) {
    throw Error(ErrorCode::StateDomainViolation, "cell states must be Boolean");
  }
  return format_state_line(state);
}

std::vector<Neighbourhood> resolve_neighbourhoods(const MilieuMatrix& milieu) {
  const std::size_t p = milieu.dimension();
  std::vector<Neighbourhood> out;
  out.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (!milieu.contains(i, i)) {
      throw Error(ErrorCode::DimensionMismatch,
                  "cell " + std::to_string(i) + " is missing from its own milieu");
    }
    std::vector<std::size_t> others;
    for (const MilieuEntry& e : milieu.row(i)) {
      if (e.source != i) others.push_back(e.source);
    }
    if (others.size() > 2) {
      throw Error(ErrorCode::DimensionMismatch,
                  "cell " + std::to_string(i) + " has " + std::to_string(others.size() + 1) +
                      " milieu inputs; a rule table takes 3");
    }
    Neighbourhood n{i, i, i};
    if (others.size() == 2) {
      const auto below = [&](std::size_t j) { return (i + p - j) % p; };
      const bool first_is_left = below(others[0]) < below(others[1]);
      n.left = first_is_left ? others[0] : others[1];
      n.right = first_is_left ? others[1] : others[0];
    } else if (others.size() == 1) {
      (others[0] < i ? n.left : n.right) = others[0];
    }
    out.push_back(n);
  }
  return out;
}

MetastableSystem make_system(RuleNumber rule, const EntityTuple& initial) {
  SystemSpec spec;
  spec.states = StateKind::Boolean;
  spec.entities = initial.size();
  spec.schedule = Schedule::SynchronousAll;
  return modulate(spec, rule_table(rule), ring_milieu(initial.size()), initial);
}

}  // namespace metasys::ca
