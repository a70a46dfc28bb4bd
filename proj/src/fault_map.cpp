#include "zlsim/fault_map.hpp"

#include <stdexcept>
#include <string>

namespace zlsim {

void FaultMap::check(int crow, int column) const {
  if (crow < 0 || crow >= crows_ || column < 0 || column >= columns_) {
    throw std::out_of_range("fault at (crow " + std::to_string(crow) + ", column " +
                            std::to_string(column) + ") outside geometry");
  }
}

void FaultMap::add_defect(SegmentId s) {
  check(s.crow, s.column);
  defects_.insert(s);
}

void FaultMap::add_transient(TransientUpset t) {
  check(t.crow, t.column);
  if (t.slot < 0) throw std::out_of_range("transient slot must be non-negative");
  transients_.insert(t);
}

bool FaultMap::column_has_defect(int column) const {
  for (const auto& d : defects_) {
    if (d.column == column) return true;
  }
  return false;
}

}  // namespace zlsim
