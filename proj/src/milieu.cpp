#include "metasys/milieu.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metasys/error.hpp"

namespace metasys {

namespace {

bool by_source(const MilieuEntry& e, std::size_t j) { return e.source < j; }

}  // namespace

MilieuMatrix::MilieuMatrix(MilieuKind kind, std::size_t p) : kind_(kind), rows_(p) {}

std::size_t MilieuMatrix::link_count() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

bool MilieuMatrix::contains(std::size_t i, std::size_t j) const {
  return weight(i, j).has_value();
}

std::optional<double> MilieuMatrix::weight(std::size_t i, std::size_t j) const {
  const auto& r = rows_.at(i);
  const auto it = std::lower_bound(r.begin(), r.end(), j, by_source);
  if (it == r.end() || it->source != j) return std::nullopt;
  return it->weight;
}

MilieuEntry* MilieuMatrix::find(std::size_t i, std::size_t j) {
  auto& r = rows_[i];
  const auto it = std::lower_bound(r.begin(), r.end(), j, by_source);
  if (it == r.end() || it->source != j) return nullptr;
  return &*it;
}

void MilieuMatrix::set(std::size_t i, std::size_t j, double weight) {
  const std::size_t p = dimension();
  if (i >= p || j >= p) {
    throw Error(ErrorCode::DimensionMismatch,
                "milieu entry (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") outside a " + std::to_string(p) + "x" + std::to_string(p) + " matrix");
  }
  if (kind_ == MilieuKind::Boolean && weight != 1.0) {
    throw Error(ErrorCode::StateDomainViolation, "Boolean milieu links have weight 1");
  }
  if (!std::isfinite(weight)) {
    throw Error(ErrorCode::StateDomainViolation, "milieu weight must be finite");
  }
  if (MilieuEntry* e = find(i, j)) {
    e->weight = weight + 0.0;
    return;
  }
  auto& r = rows_[i];
  r.insert(std::lower_bound(r.begin(), r.end(), j, by_source), MilieuEntry{j, weight + 0.0});
}

void MilieuMatrix::erase(std::size_t i, std::size_t j) {
  auto& r = rows_.at(i);
  const auto it = std::lower_bound(r.begin(), r.end(), j, by_source);
  if (it != r.end() && it->source == j) r.erase(it);
}

}  // namespace metasys
