#include "sdflow/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "finite_difference.hpp"

namespace sdflow {

namespace {

// Differences of squares without forming the squares: Q and M carry terms like
// S^2/4 that dwarf their second differences.
double dsq(double a0, double a1) noexcept { return (a1 - a0) * (a1 + a0); }

double q_increment(const ProfileState& s0, const ProfileState& s1, const QParams& p) noexcept {
  return dsq(s0.k, s1.k) + p.c2 * (s1.S - s0.S) +
         0.25 * (dsq(s0.y, s1.y) + dsq(s0.phi, s1.phi) - dsq(s0.S, s1.S));
}

double m_increment(const ProfileState& s0, const ProfileState& s1, double a, double b) noexcept {
  return dsq(s0.k, s1.k) + 2.0 * (a * (s1.y - s0.y) + b * (s1.phi - s0.phi));
}

double lattice_spacing(const Trajectory& traj) {
  if (traj.lattice_spacing > 0.0) return traj.lattice_spacing;
  // Refinement only inserts samples between lattice points, so the widest gap
  // is the lattice spacing.
  double h = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    h = std::max(h, std::abs(traj.samples[i].y - traj.samples[i - 1].y));
  }
  return h;
}

std::vector<const ProfileState*> lattice_samples(const Trajectory& traj,
                                                 const IdentityOptions& opts) {
  std::vector<const ProfileState*> out;
  const auto& s = traj.samples;
  if (s.empty()) return out;
  const double h = lattice_spacing(traj);
  if (!(h > 0.0)) return out;
  const double y0 = traj.lattice_origin;
  for (const auto& p : s) {
    if (std::abs(p.y) > opts.max_abs_y) continue;
    const double j = (p.y - y0) / h;
    if (std::abs(j - std::round(j)) <= 1e-6) out.push_back(&p);
  }
  return out;
}

// The initial state: the sample with S = 0 (trajectories may hold both
// directions in ascending y).
const ProfileState& anchor(const Trajectory& traj) {
  for (const auto& s : traj.samples) {
    if (s.S == 0.0) return s;
  }
  return traj.samples.front();
}

bool stencil_ok(const ProfileState& m, const ProfileState& c, const ProfileState& p,
                const IdentityOptions& opts) {
  return detail::evenly_spaced(m.y, c.y, p.y) && std::abs(m.psi) <= opts.max_slope &&
         std::abs(c.psi) <= opts.max_slope && std::abs(p.psi) <= opts.max_slope;
}

// (1/v) d/dy((1/v) dF/dy) - 2 w^2 on consecutive lattice triples; `inc`
// returns F(s1) - F(s0).
template <class Increment>
IdentityReport weighted_second_derivative(const Trajectory& traj, const IdentityOptions& opts,
                                          Increment inc) {
  if (traj.samples.size() < 7) {
    throw std::invalid_argument("identity check needs at least 7 samples");
  }
  const auto pts = lattice_samples(traj, opts);
  IdentityReport r;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const ProfileState& m = *pts[i - 1];
    const ProfileState& c = *pts[i];
    const ProfileState& p = *pts[i + 1];
    if (!stencil_ok(m, c, p, opts)) continue;
    // Ordered by y so the centered formula does not care about the direction.
    const ProfileState& lo = m.y < p.y ? m : p;
    const ProfileState& hi = m.y < p.y ? p : m;
    // (1/v) d/dy is d/dS: both weighted passes are differences in arc length.
    const double dl = c.S - lo.S;
    const double dr = hi.S - c.S;
    const double lhs = (inc(c, hi) / dr - inc(lo, c) / dl) / (0.5 * (dl + dr));
    const double res = std::abs(lhs - 2.0 * c.w * c.w);
    ++r.samples_used;
    if (res >= r.max_residual) {
      r.max_residual = res;
      r.location = c.y;
    }
    if (lhs < r.min_lhs) {
      r.min_lhs = lhs;
      r.min_lhs_location = c.y;
    }
  }
  return r;
}

}  // namespace

double q_value(const ProfileState& s, const QParams& p) noexcept {
  return s.k * s.k + p.c1 + p.c2 * s.S + 0.25 * (s.y * s.y + s.phi * s.phi) - 0.25 * s.S * s.S;
}

QParams q_paper_constants(double phi0, int direction) noexcept {
  const double sign = direction < 0 ? -1.0 : 1.0;
  return QParams{-0.25 * phi0 * phi0, -0.5 * std::abs(phi0) * sign};
}

double m_value(const ProfileState& s, double a, double b) noexcept {
  return s.k * s.k + 2.0 * (a * s.y + b * s.phi);
}

IdentityReport convexity_residual_q(const Trajectory& traj, const QParams& p,
                                    const IdentityOptions& opts) {
  if (!std::holds_alternative<SelfSimilar>(traj.kind)) {
    throw std::invalid_argument("Q-convexity applies to self-similar trajectories only");
  }
  return weighted_second_derivative(
      traj, opts, [&p](const ProfileState& a, const ProfileState& b) { return q_increment(a, b, p); });
}

IdentityReport convexity_residual_m(const Trajectory& traj, double a, double b,
                                    const IdentityOptions& opts) {
  if (!std::holds_alternative<TravellingWave>(traj.kind)) {
    throw std::invalid_argument("M-convexity applies to travelling-wave trajectories only");
  }
  return weighted_second_derivative(traj, opts,
                                    [a, b](const ProfileState& s0, const ProfileState& s1) {
                                      return m_increment(s0, s1, a, b);
                                    });
}

IdentityReport tangential_identity_residual(const Trajectory& traj, double a, double b,
                                            const IdentityOptions& opts) {
  const auto pts = lattice_samples(traj, opts);
  IdentityReport r;
  auto f = [a, b](const ProfileState& s) { return (a + b * s.psi) / s.v(); };
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const ProfileState& m = *pts[i - 1];
    const ProfileState& c = *pts[i];
    const ProfileState& p = *pts[i + 1];
    if (!stencil_ok(m, c, p, opts)) continue;
    const double lhs =
        c.v() * detail::three_point_derivative(m.S, c.S, p.S, f(m), f(c), f(p));
    const double res = std::abs(lhs - c.k * (b - a * c.psi));
    ++r.samples_used;
    if (res >= r.max_residual) {
      r.max_residual = res;
      r.location = c.y;
    }
  }
  return r;
}

bool cauchy_schwarz_check(const ProfileState& s) {
  if (s.phi == 0.0 && s.y == 0.0) {
    throw std::invalid_argument("cauchy_schwarz_check is undefined at phi = y = 0");
  }
  return std::abs(s.phi * s.psi + s.y) <= s.v() * std::hypot(s.phi, s.y) + 1e-12;
}

SteadyIntegralReport steady_first_integrals(const Trajectory& traj, double y_window) {
  if (!std::holds_alternative<Steady>(traj.kind)) {
    throw std::invalid_argument("first integrals apply to steady trajectories only");
  }
  SteadyIntegralReport r;
  if (traj.samples.empty()) return r;
  const ProfileState& s0 = anchor(traj);
  for (const auto& s : traj.samples) {
    if (std::abs(s.y - s0.y) > y_window) continue;
    r.max_w_drift = std::max(r.max_w_drift, std::abs(s.w - s0.w));
    r.max_k_drift = std::max(r.max_k_drift, std::abs(s.k - s0.w * (s.S - s0.S) - s0.k));
    ++r.samples_used;
  }
  return r;
}

QBoundReport q_bound(const Trajectory& traj) {
  if (!std::holds_alternative<SelfSimilar>(traj.kind)) {
    throw std::invalid_argument("the Q bound applies to self-similar trajectories only");
  }
  QBoundReport r;
  if (traj.samples.empty()) return r;
  const ProfileState& s0 = anchor(traj);
  if (s0.y != 0.0 || s0.S != 0.0) {
    throw std::invalid_argument("the Q bound needs a trajectory starting at y = 0, S = 0");
  }
  for (const auto& s : traj.samples) {
    const QParams p = q_paper_constants(s0.phi, s.S < 0.0 ? -1 : +1);
    const double excess = q_value(s, p) - s.k * s.k;
    ++r.samples_used;
    if (excess > r.max_excess) {
      r.max_excess = excess;
      r.location = s.y;
    }
  }
  return r;
}

}  // namespace sdflow
