#pragma once

#include <cmath>

namespace sdflow::detail {

// Derivative at x0 of the quadratic through (xm, fm), (x0, f0), (xp, fp).
// Nodes may be unevenly spaced and in either order.
inline double three_point_derivative(double xm, double x0, double xp, double fm, double f0,
                                     double fp) noexcept {
  const double hl = x0 - xm;
  const double hr = xp - x0;
  return (hl * hl * fp - hr * hr * fm + (hr * hr - hl * hl) * f0) / (hl * hr * (hl + hr));
}

// True when the three nodes are equally spaced to relative tolerance `rel`.
inline bool evenly_spaced(double xm, double x0, double xp, double rel = 1e-6) noexcept {
  const double hl = x0 - xm;
  const double hr = xp - x0;
  return std::abs(hl - hr) <= rel * std::abs(hl + hr);
}

}  // namespace sdflow::detail
