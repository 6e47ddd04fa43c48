#include "metasys/state.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "metasys/error.hpp"

namespace metasys {

std::string_view to_string(StateKind kind) {
  return kind == StateKind::Boolean ? "boolean" : "real";
}

bool in_state_set(StateKind kind, double value) noexcept {
  if (kind == StateKind::Boolean) return value == 0.0 || value == 1.0;
  return std::isfinite(value);
}

EntityTuple::EntityTuple(StateKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!in_state_set(kind_, values_[i])) {
      throw Error(ErrorCode::StateDomainViolation,
                  "entity " + std::to_string(i) + " has a state outside the " +
                      std::string(to_string(kind_)) + " state set");
    }
  }
  // Boolean tuples never carry -0.0.
  if (kind_ == StateKind::Boolean) {
    for (double& v : values_) v = v == 0.0 ? 0.0 : 1.0;
  }
}

EntityTuple EntityTuple::zeros(StateKind kind, std::size_t p) {
  return EntityTuple(kind, std::vector<double>(p, 0.0));
}

void EntityTuple::set(std::size_t i, double value) {
  if (!in_state_set(kind_, value)) {
    throw Error(ErrorCode::StateDomainViolation,
                "state outside the " + std::string(to_string(kind_)) + " state set");
  }
  values_.at(i) = (kind_ == StateKind::Boolean) ? (value == 0.0 ? 0.0 : 1.0) : value;
}

double match(const EntityTuple& a, const EntityTuple& b, double tolerance) {
  if (a.size() != b.size() || a.kind() != b.kind()) {
    throw Error(ErrorCode::DimensionMismatch,
                "match: tuples of length " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  if (a.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "match: empty tuples");
  }
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.kind() == StateKind::Boolean) {
      equal += a[i] == b[i];
    } else {
      equal += std::fabs(a[i] - b[i]) <= tolerance;
    }
  }
  return static_cast<double>(equal) / static_cast<double>(a.size());
}

std::string format_state_line(const EntityTuple& state) {
  std::string out;
  if (state.kind() == StateKind::Boolean) {
    out.reserve(state.size());
    for (double v : state.values()) out.push_back(v == 0.0 ? '0' : '1');
    return out;
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i != 0) out.push_back(' ');
    out += format_decimal(state[i]);
  }
  return out;
}

EntityTuple parse_state_line(std::string_view line, StateKind kind) {
  std::vector<double> values;
  if (kind == StateKind::Boolean) {
    values.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c != '0' && c != '1') {
        throw Error(ErrorCode::BadCharacter,
                    "state character " + std::to_string(i) + " is not '0' or '1'");
      }
      values.push_back(c == '1' ? 1.0 : 0.0);
    }
  } else {
    std::size_t pos = 0;
    while (pos < line.size()) {
      const std::size_t end = std::min(line.find(' ', pos), line.size());
      double v = 0.0;
      if (!parse_decimal(line.substr(pos, end - pos), v)) {
        throw Error(ErrorCode::BadCharacter,
                    "malformed real state '" + std::string(line.substr(pos, end - pos)) + "'");
      }
      values.push_back(v);
      pos = end + 1;
    }
  }
  if (values.empty()) throw Error(ErrorCode::BadCharacter, "empty state line");
  return EntityTuple(kind, std::move(values));
}

std::string format_decimal(double value) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.9f", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

bool parse_decimal(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  // from_chars rejects a leading '+'.
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::fixed);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return false;
  out = value;
  return true;
}

double quantize_decimal(double value) {
  return std::round(value * 1e9) / 1e9 + 0.0;
}

}  // namespace metasys
