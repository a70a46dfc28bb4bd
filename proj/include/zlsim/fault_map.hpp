#pragma once

// Injected faults on 64-PE column segments. A segment is addressed by the
// CRow (array index) it sits in and its physical column.

#include <compare>
#include <cstddef>
#include <set>
#include <vector>

namespace zlsim {

struct SegmentId {
  int crow = 0;
  int column = 0;
  friend constexpr auto operator<=>(const SegmentId&, const SegmentId&) = default;
};

// One-slot upset of a segment's output (soft error).
struct TransientUpset {
  int crow = 0;
  int column = 0;
  int slot = 0;
  friend constexpr auto operator<=>(const TransientUpset&, const TransientUpset&) = default;
};

// A corrupted segment replaces the FP8 partial sum leaving it with the
// bitwise NOT of the correct code.
class FaultMap {
 public:
  FaultMap() = default;
  FaultMap(int crows, int columns) : crows_(crows), columns_(columns) {}

  void add_defect(SegmentId s);
  void add_transient(TransientUpset t);
  void clear() {
    defects_.clear();
    transients_.clear();
  }

  bool defective(int crow, int column) const { return defects_.count({crow, column}) != 0; }
  bool column_has_defect(int column) const;
  bool corrupts(int crow, int column, int slot) const {
    if (defects_.empty() && transients_.empty()) return false;
    return defective(crow, column) || transients_.count({crow, column, slot}) != 0;
  }

  const std::set<SegmentId>& defects() const { return defects_; }
  const std::set<TransientUpset>& transients() const { return transients_; }
  std::size_t size() const { return defects_.size(); }

 private:
  void check(int crow, int column) const;

  int crows_ = 0;
  int columns_ = 0;
  std::set<SegmentId> defects_;
  std::set<TransientUpset> transients_;
};

}  // namespace zlsim
