#pragma once

#include <cmath>
#include <limits>

namespace dualsmooth {

// Extended-real convention used throughout: penalty values live in
// R ∪ {+inf}, conjugates and dual objectives may additionally be -inf.
// +inf is always produced explicitly (domain violations), never by
// arithmetic overflow.
inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();
inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

inline bool is_finite(double v) { return std::isfinite(v); }

// Sum of extended reals from the same half-line (no +inf + -inf pairs).
inline double ext_add(double a, double b) {
  if (a == kPlusInf || b == kPlusInf) return kPlusInf;
  return a + b;
}

}  // namespace dualsmooth
