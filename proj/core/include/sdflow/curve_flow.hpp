#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace sdflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) noexcept = default;
};

double dot(Vec2 a, Vec2 b) noexcept;
double cross(Vec2 a, Vec2 b) noexcept;
double norm(Vec2 a) noexcept;

/// Closed polyline; point 0 follows point n-1. Self-intersections allowed.
class ClosedCurve {
 public:
  static constexpr std::size_t kMinPoints = 16;

  /// Throws std::invalid_argument for n < 16, non-finite points, repeated
  /// consecutive points or zero length.
  explicit ClosedCurve(std::vector<Vec2> points, double t = 0.0);

  const std::vector<Vec2>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double time() const noexcept { return t_; }
  const Vec2& operator[](std::size_t i) const noexcept { return points_[i]; }

 private:
  std::vector<Vec2> points_;
  double t_;
};

/// Open sampled arc (no wrap-around); used for the clothoid.
struct OpenArc {
  std::vector<Vec2> points;
};

struct CurveMonitors {
  double length = 0.0;
  double signed_area = 0.0;  ///< shoelace; positive for counter-clockwise traversal
  double max_curvature = 0.0;
  double diameter = 0.0;  ///< max pairwise vertex distance
};

CurveMonitors curve_monitors(const ClosedCurve& c);

/// Per-vertex signed curvature and left unit normal.
///
/// k is the curvature of the circle through a vertex and its two neighbours
/// (exact on points of a circle, second order for uniform arc-length
/// samples), signed positive when the curve turns left. Open arcs get NaN at
/// the two end vertices.
struct CurvatureProfile {
  std::vector<double> k;
  std::vector<Vec2> normal;
  std::vector<double> s;  ///< cumulative chord length at each vertex
};

/// Throws std::invalid_argument on degenerate (zero-length) edges.
CurvatureProfile curvature_profile(const ClosedCurve& c);
CurvatureProfile curvature_profile(const OpenArc& c);

/// V = -d^2 k / ds^2 along the left normal (non-uniform second difference in
/// chord length). Open arcs get NaN within two vertices of either end.
std::vector<double> normal_velocity(const ClosedCurve& c);
std::vector<double> normal_velocity(const OpenArc& c);

/// Redistributes n points uniformly in arc length along the periodic cubic
/// spline through the vertices (chord-length parametrization).
ClosedCurve resample_uniform(const ClosedCurve& c, std::size_t n);

struct CurveFlowOptions {
  double dt = 1e-5;
  double t_end = 1.0;
  std::size_t resample_every = 10;
  double extinction_frac = 0.05;
  /// When positive, each step uses min(dt, relative_dt * diameter^4): the
  /// flow's time scale shrinks like size^4.
  double relative_dt = 0.0;
  double frame_interval = 0.1;
  /// Also record a frame each time the diameter first drops below
  /// 0.9, 0.8, ..., 0.1 of its initial value.
  bool diameter_milestones = true;

  void validate() const;
};

struct CurveFrame {
  double t = 0.0;
  ClosedCurve curve;
  CurveMonitors monitors;
};

enum class CurveOutcome { Reached, Extinct, Failed };

struct CurveFlowResult {
  std::vector<CurveFrame> frames;
  CurveOutcome outcome = CurveOutcome::Reached;
  double t_ext = std::numeric_limits<double>::quiet_NaN();
  std::string failure;
  std::size_t steps = 0;
};

std::string_view curve_outcome_name(CurveOutcome o) noexcept;

/// Curve diffusion flow X_t = V N with V = -k_ss.
///
/// Each step solves (I + dt D4) X_new = X + dt (V N + D4 X) per coordinate,
/// with D4 the periodic compact fourth difference in vertex index scaled by
/// the shortest edge: explicit geometry, implicitly damped stiff part.
/// Vertices are redistributed uniformly in arc length every resample_every
/// steps. Extinct once the diameter drops below extinction_frac of its
/// initial value; Failed on non-finite values or collapsed edges.
CurveFlowResult flow(const ClosedCurve& c, const CurveFlowOptions& opts);

/// sqrt(6)/(1 + sin^2 t) (cos t, sin(2t)/2).
Vec2 lemniscate_point(double t) noexcept;

/// Lemniscate sampled at n uniform parameters, then resampled to uniform arc
/// length. Throws std::invalid_argument for n < 64.
ClosedCurve seed_lemniscate(std::size_t n);

/// Counter-clockwise circle of radius 1/kappa about the origin.
ClosedCurve seed_circle(double kappa, std::size_t n);

/// Counter-clockwise ellipse with semi-axes a, b sampled uniformly in arc length.
ClosedCurve seed_ellipse(double a, double b, std::size_t n);

/// Point at arc length s of the clothoid through the origin with tangent
/// angle s^2/2: (int_0^s cos(u^2/2) du, int_0^s sin(u^2/2) du), by composite
/// Gauss-Legendre quadrature.
Vec2 clothoid_point(double s);

/// n samples uniform in arc length on s in [-s_max, s_max]. Throws for
/// s_max <= 0 or n < 16.
OpenArc seed_clothoid(double s_max, std::size_t n);

/// Symmetric Hausdorff distance between two closed polylines (vertex to
/// segment, both ways).
double hausdorff_distance(const ClosedCurve& a, const ClosedCurve& b);

/// Curve translated to its vertex centroid and scaled to unit diameter.
ClosedCurve normalized_shape(const ClosedCurve& c);

}  // namespace sdflow
