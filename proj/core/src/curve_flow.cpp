#include "sdflow/curve_flow.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "sdflow/geometry.hpp"
#include "sdflow/periodic_solver.hpp"

namespace sdflow {

double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }

ClosedCurve::ClosedCurve(std::vector<Vec2> points, double t) : points_(std::move(points)), t_(t) {
  const std::size_t n = points_.size();
  if (n < kMinPoints) {
    throw std::invalid_argument("ClosedCurve: need at least 16 points, got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = points_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("ClosedCurve: non-finite point");
    }
    if (p == points_[(i + 1) % n]) {
      throw std::invalid_argument("ClosedCurve: repeated consecutive point at index " +
                                  std::to_string(i));
    }
  }
}

namespace {

double diameter_of(const std::vector<Vec2>& p) {
  double best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double dx = p[i].x - p[j].x;
      const double dy = p[i].y - p[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(best);
}

// Curvature of the circle through a, b, c, positive for a left turn at b.
double menger(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 e0 = b - a;
  const Vec2 e1 = c - b;
  const double l0 = norm(e0);
  const double l1 = norm(e1);
  const double l2 = norm(c - a);
  if (l0 == 0.0 || l1 == 0.0) throw std::invalid_argument("curvature: degenerate edge");
  if (l2 == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * cross(e0, e1) / (l0 * l1 * l2);
}

Vec2 left_normal(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 e0 = b - a;
  const Vec2 e1 = c - b;
  Vec2 t = (1.0 / norm(e0)) * e0 + (1.0 / norm(e1)) * e1;
  double len = norm(t);
  if (len == 0.0) {
    t = e1;
    len = norm(t);
  }
  return {-t.y / len, t.x / len};
}

// Profile over a vertex chain; `closed` wraps indices.
CurvatureProfile profile_of(const std::vector<Vec2>& p, bool closed) {
  const std::size_t n = p.size();
  CurvatureProfile out;
  out.k.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.normal.assign(n, Vec2{std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN()});
  out.s.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double e = norm(p[i] - p[i - 1]);
    if (e == 0.0) throw std::invalid_argument("curvature: degenerate edge");
    out.s[i] = out.s[i - 1] + e;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!closed && (i == 0 || i + 1 == n)) continue;
    const Vec2 a = p[(i + n - 1) % n];
    const Vec2 c = p[(i + 1) % n];
    out.k[i] = menger(a, p[i], c);
    out.normal[i] = left_normal(a, p[i], c);
  }
  return out;
}

std::vector<double> velocity_of(const std::vector<Vec2>& p, const std::vector<double>& k,
                                bool closed) {
  const std::size_t n = p.size();
  std::vector<double> v(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    if (!closed && (i < 2 || i + 2 >= n)) continue;
    const std::size_t im = (i + n - 1) % n;
    const std::size_t ip = (i + 1) % n;
    const double hl = norm(p[i] - p[im]);
    const double hr = norm(p[ip] - p[i]);
    const double kss = 2.0 * ((k[ip] - k[i]) / hr - (k[i] - k[im]) / hl) / (hl + hr);
    v[i] = -kss;
  }
  return v;
}

}  // namespace

CurveMonitors curve_monitors(const ClosedCurve& c) {
  const auto& p = c.points();
  const std::size_t n = p.size();
  CurveMonitors m;
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p[i];
    const Vec2 b = p[(i + 1) % n];
    m.length += norm(b - a);
    area2 += cross(a, b);
  }
  m.signed_area = 0.5 * area2;
  const auto prof = profile_of(p, true);
  for (double k : prof.k) m.max_curvature = std::max(m.max_curvature, std::abs(k));
  m.diameter = diameter_of(p);
  return m;
}

CurvatureProfile curvature_profile(const ClosedCurve& c) { return profile_of(c.points(), true); }

CurvatureProfile curvature_profile(const OpenArc& c) {
  if (c.points.size() < 3) throw std::invalid_argument("curvature: open arc needs 3 points");
  return profile_of(c.points, false);
}

std::vector<double> normal_velocity(const ClosedCurve& c) {
  return velocity_of(c.points(), profile_of(c.points(), true).k, true);
}

std::vector<double> normal_velocity(const OpenArc& c) {
  if (c.points.size() < 5) throw std::invalid_argument("normal_velocity: open arc needs 5 points");
  return velocity_of(c.points, profile_of(c.points, false).k, false);
}

void CurveFlowOptions::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(std::isfinite(t_end) && t_end >= 0.0)) {
    throw std::invalid_argument("t_end must be non-negative");
  }
  if (resample_every == 0) throw std::invalid_argument("resample_every must be positive");
  if (!(extinction_frac > 0.0 && extinction_frac < 1.0)) {
    throw std::invalid_argument("extinction_frac must lie in (0, 1)");
  }
  if (!(relative_dt >= 0.0)) throw std::invalid_argument("relative_dt must be non-negative");
  if (!(frame_interval > 0.0)) throw std::invalid_argument("frame_interval must be positive");
}

std::string_view curve_outcome_name(CurveOutcome o) noexcept {
  switch (o) {
    case CurveOutcome::Reached:
      return "reached";
    case CurveOutcome::Extinct:
      return "extinct";
    case CurveOutcome::Failed:
      return "failed";
  }
  return "unknown";
}

CurveFlowResult flow(const ClosedCurve& c, const CurveFlowOptions& opts) {
  opts.validate();
  CurveFlowResult res;
  const std::size_t n = c.size();
  std::vector<Vec2> p = c.points();
  double t = c.time();
  const double t_stop = t + opts.t_end;

  const CurveMonitors m0 = curve_monitors(c);
  const double diam0 = m0.diameter;
  double diam = diam0;
  res.frames.push_back({t, c, m0});
  double next_frame = t + opts.frame_interval;
  double milestone = 0.9;

  PeriodicBiharmonicSolver solver(n);
  std::vector<double> xs(n), ys(n);
  auto fail = [&](std::string why) {
    res.outcome = CurveOutcome::Failed;
    res.failure = std::move(why);
    return res;
  };

  while (t < t_stop) {
    double dt = opts.dt;
    if (opts.relative_dt > 0.0) {
      const double d2 = diam * diam;
      dt = std::min(dt, opts.relative_dt * d2 * d2);
    }
    bool frame_due = false;
    double t_new = t + dt;
    if (t_new >= next_frame) {
      t_new = next_frame;
      frame_due = true;
    }
    if (t_new >= t_stop) {
      t_new = t_stop;
      frame_due = true;
    }
    dt = t_new - t;

    double hmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) hmin = std::min(hmin, norm(p[(i + 1) % n] - p[i]));
    if (!(hmin > 64.0 * std::numeric_limits<double>::epsilon() * diam)) {
      return fail("edge collapse at t = " + std::to_string(t));
    }

    const auto prof = profile_of(p, true);
    const auto vel = velocity_of(p, prof.k, true);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = p[i].x;
      ys[i] = p[i].y;
    }
    const auto d4x = detail::biharmonic(xs, hmin);
    const auto d4y = detail::biharmonic(ys, hmin);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] += dt * (vel[i] * prof.normal[i].x + d4x[i]);
      ys[i] += dt * (vel[i] * prof.normal[i].y + d4y[i]);
    }
    solver.solve(xs, dt, hmin);
    solver.solve(ys, dt, hmin);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
        return fail("non-finite vertex at t = " + std::to_string(t));
      }
      p[i] = {xs[i], ys[i]};
    }
    t = t_new;
    ++res.steps;

    const bool resample = res.steps % opts.resample_every == 0;
    if (resample || frame_due) {
      try {
        ClosedCurve cur(p, t);
        if (resample) {
          cur = resample_uniform(cur, n);
          p = cur.points();
        }
        diam = diameter_of(p);
        const bool extinct = diam < opts.extinction_frac * diam0;
        bool record = frame_due || extinct;
        while (opts.diameter_milestones && milestone > 0.05 && diam < milestone * diam0) {
          record = true;
          milestone -= 0.1;
        }
        if (record) res.frames.push_back({t, cur, curve_monitors(cur)});
        if (frame_due && t >= next_frame) next_frame += opts.frame_interval;
        if (extinct) {
          res.outcome = CurveOutcome::Extinct;
          res.t_ext = t;
          return res;
        }
      } catch (const std::invalid_argument& e) {
        return fail(e.what());
      }
    }
  }
  res.outcome = CurveOutcome::Reached;
  return res;
}

Vec2 lemniscate_point(double t) noexcept {
  const double s = std::sin(t);
  const double r = std::sqrt(6.0) / (1.0 + s * s);
  return {r * std::cos(t), r * 0.5 * std::sin(2.0 * t)};
}

ClosedCurve seed_lemniscate(std::size_t n) {
  if (n < 64) throw std::invalid_argument("seed_lemniscate: n must be at least 64");
  std::vector<Vec2> p(n);
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = lemniscate_point(2.0 * std::numbers::pi * static_cast<double>(j) /
                            static_cast<double>(n));
  }
  return resample_uniform(ClosedCurve(std::move(p)), n);
}

ClosedCurve seed_circle(double kappa, std::size_t n) {
  if (!(std::isfinite(kappa) && kappa > 0.0)) {
    throw std::invalid_argument("seed_circle: kappa must be positive");
  }
  std::vector<Vec2> p(n);
  const double r = 1.0 / kappa;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    p[j] = {r * std::cos(a), r * std::sin(a)};
  }
  return ClosedCurve(std::move(p));
}

ClosedCurve seed_ellipse(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("seed_ellipse: axes must be positive");
  const std::size_t m = 8 * n;
  std::vector<Vec2> p(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double u = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    p[j] = {a * std::cos(u), b * std::sin(u)};
  }
  return resample_uniform(ClosedCurve(std::move(p)), n);
}

Vec2 clothoid_point(double s) {
  struct TableDeleter {
    void operator()(gsl_integration_glfixed_table* t) const noexcept {
      gsl_integration_glfixed_table_free(t);
    }
  };
  static const std::unique_ptr<gsl_integration_glfixed_table, TableDeleter> table(
      gsl_integration_glfixed_table_alloc(16));
  if (s == 0.0) return {};
  const auto panels = static_cast<int>(std::ceil(std::abs(s) / 0.25));
  Vec2 out;
  for (int j = 0; j < panels; ++j) {
    const double a = s * j / panels;
    const double b = s * (j + 1) / panels;
    for (std::size_t q = 0; q < 16; ++q) {
      double xq = 0.0;
      double wq = 0.0;
      gsl_integration_glfixed_point(a, b, q, &xq, &wq, table.get());
      const double th = 0.5 * xq * xq;
      out.x += wq * std::cos(th);
      out.y += wq * std::sin(th);
    }
  }
  return out;
}

OpenArc seed_clothoid(double s_max, std::size_t n) {
  if (!(std::isfinite(s_max) && s_max > 0.0)) {
    throw std::invalid_argument("seed_clothoid: s_max must be positive");
  }
  if (n < 16) throw std::invalid_argument("seed_clothoid: n must be at least 16");
  OpenArc arc;
  arc.points.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = -s_max + 2.0 * s_max * static_cast<double>(j) / static_cast<double>(n - 1);
    arc.points[j] = clothoid_point(s);
  }
  return arc;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double directed_hausdorff(const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
  double worst = 0.0;
  const std::size_t m = to.size();
  for (const Vec2& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      best = std::min(best, point_segment_distance(p, to[j], to[(j + 1) % m]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff_distance(const ClosedCurve& a, const ClosedCurve& b) {
  return std::max(directed_hausdorff(a.points(), b.points()),
                  directed_hausdorff(b.points(), a.points()));
}

ClosedCurve normalized_shape(const ClosedCurve& c) {
  Vec2 centroid;
  for (const Vec2& p : c.points()) centroid = centroid + p;
  centroid = (1.0 / static_cast<double>(c.size())) * centroid;
  const double d = diameter_of(c.points());
  std::vector<Vec2> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = (1.0 / d) * (c[i] - centroid);
  return ClosedCurve(std::move(out), c.time());
}

}  // namespace sdflow
