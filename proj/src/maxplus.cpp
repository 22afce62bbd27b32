#include "mpthermo/maxplus.hpp"

#include <ostream>

namespace mpt {

std::ostream& operator<<(std::ostream& os, MaxPlusValue v) {
  if (v.is_bottom()) return os << "-inf";
  return os << v.value();
}

double residual(MaxPlusValue a, MaxPlusValue b) {
  if (a.is_bottom() && b.is_bottom()) return 0.0;
  if (a.is_bottom() || b.is_bottom()) return std::numeric_limits<double>::infinity();
  return std::abs(a.value() - b.value());
}

}  // namespace mpt
