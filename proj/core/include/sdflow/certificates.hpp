#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "sdflow/soliton.hpp"

namespace sdflow {

struct QParams {
  double c1 = 0.0;
  double c2 = 0.0;
};

struct IdentityReport {
  double max_residual = 0.0;
  double location = std::numeric_limits<double>::quiet_NaN();  ///< y of the worst residual
  std::size_t samples_used = 0;
  /// Smallest left-hand side seen (convexity checks only); +inf otherwise.
  double min_lhs = std::numeric_limits<double>::infinity();
  double min_lhs_location = std::numeric_limits<double>::quiet_NaN();
};

/// Which samples enter a finite-difference identity check.
///
/// Only lattice samples (uniform in y) are used, so every stencil is a
/// centered one; samples inserted by angle refinement are skipped. Stencils
/// touching |psi| > max_slope are skipped too: there the y-derivatives of the
/// profile grow like powers of v and the O(h^2) error constant is unbounded.
struct IdentityOptions {
  double max_slope = 1.5;
  double max_abs_y = std::numeric_limits<double>::infinity();
};

/// k^2 + c1 + c2 S + (y^2 + phi^2)/4 - S^2/4.
double q_value(const ProfileState& s, const QParams& p) noexcept;

/// c1 = -phi0^2/4 and c2 = -|phi0|/2 * direction.
///
/// With direction = +1 (samples with S >= 0) this gives Q <= k^2. For S < 0
/// the sign of c2 must flip: the bound rests on sqrt(y^2 + phi^2) <= |S| + |phi0|.
QParams q_paper_constants(double phi0, int direction = +1) noexcept;

/// k^2 + 2 (a y + b phi).
double m_value(const ProfileState& s, double a, double b) noexcept;

/// max |(1/v) d/dy((1/v) dQ/dy) - 2 w^2| over lattice samples.
/// Throws std::invalid_argument unless the trajectory is self-similar with at
/// least 7 samples.
IdentityReport convexity_residual_q(const Trajectory& traj, const QParams& p,
                                    const IdentityOptions& opts = {});

/// Same check with M(a, b) in place of Q. (a, b) need not match the
/// trajectory's own direction; a mismatch shows up as a large residual.
/// Throws std::invalid_argument unless the trajectory is a travelling wave.
IdentityReport convexity_residual_m(const Trajectory& traj, double a, double b,
                                    const IdentityOptions& opts = {});

/// max |d/dy((a + b psi)/v) - k (b - a psi)| over lattice samples.
IdentityReport tangential_identity_residual(const Trajectory& traj, double a, double b,
                                            const IdentityOptions& opts = {});

/// |phi psi + y| <= v sqrt(phi^2 + y^2) + 1e-12.
/// Throws std::invalid_argument at phi = y = 0.
bool cauchy_schwarz_check(const ProfileState& s);

struct SteadyIntegralReport {
  double max_w_drift = 0.0;  ///< max |w(y) - w(y0)|
  double max_k_drift = 0.0;  ///< max |k(y) - w(y0) S(y) - k(y0)|
  std::size_t samples_used = 0;
};

/// First integrals of the steady profile equation over |y - y0| <= y_window,
/// relative to the sample with S = 0.
/// Throws std::invalid_argument unless the trajectory is steady.
SteadyIntegralReport steady_first_integrals(const Trajectory& traj, double y_window = 50.0);

struct QBoundReport {
  double max_excess = -std::numeric_limits<double>::infinity();  ///< max (Q - k^2)
  double location = std::numeric_limits<double>::quiet_NaN();
  std::size_t samples_used = 0;
};

/// Q - k^2 along a self-similar trajectory with q_paper_constants(phi(y0),
/// sign of S), phi(y0) read from the sample with S = 0. Throws
/// std::invalid_argument unless that sample sits at y = 0.
QBoundReport q_bound(const Trajectory& traj);

}  // namespace sdflow
