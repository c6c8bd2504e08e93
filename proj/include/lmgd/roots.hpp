#pragma once

#include <cmath>

namespace lmgd {

/// Bisection on a bracket with f(lo) and f(hi) of opposite sign (or zero).
/// Runs until the midpoint no longer splits the bracket, so the result is
/// within one ulp of a sign change of f.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo) {
  if (f_lo == 0.0) return lo;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double f_hi = f(hi);
  return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

inline bool opposite_signs(double a, double b) {
  return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
}

}  // namespace lmgd
