#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace metasys {

enum class MilieuKind {
  Boolean,   // links only
  Weighted,  // links carry a real weight
};

struct MilieuEntry {
  std::size_t source;  // entity j in the milieu of the row entity
  double weight;       // 1.0 for Boolean links

  friend bool operator==(const MilieuEntry&, const MilieuEntry&) = default;
};

/// p x p adjacency matrix M. Row i holds the milieu m_i of entity i: an
/// entry (i, j) means entity j influences entity i.
///
/// Storage is row-sparse with columns kept in ascending order, so a link of
/// weight 0 is still a link (it counts towards q_i).
class MilieuMatrix {
 public:
  MilieuMatrix() = default;
  MilieuMatrix(MilieuKind kind, std::size_t p);

  MilieuKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return rows_.size(); }

  std::span<const MilieuEntry> row(std::size_t i) const { return rows_.at(i); }
  /// q_i, the number of entities in the milieu of entity i.
  std::size_t milieu_size(std::size_t i) const { return rows_.at(i).size(); }
  std::size_t link_count() const noexcept;

  bool contains(std::size_t i, std::size_t j) const;
  std::optional<double> weight(std::size_t i, std::size_t j) const;

  /// Adds or updates link (i, j). Boolean matrices only accept weight 1.
  /// Throws DimensionMismatch for out-of-range indices and
  /// StateDomainViolation for a non-unit Boolean weight or non-finite weight.
  void set(std::size_t i, std::size_t j, double weight = 1.0);
  void erase(std::size_t i, std::size_t j);

  friend bool operator==(const MilieuMatrix&, const MilieuMatrix&) = default;

 private:
  MilieuEntry* find(std::size_t i, std::size_t j);

  MilieuKind kind_ = MilieuKind::Boolean;
  std::vector<std::vector<MilieuEntry>> rows_;
};

}  // namespace metasys
