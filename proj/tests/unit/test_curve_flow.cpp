#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sdflow/curve_flow.hpp"

using namespace sdflow;
using std::numbers::pi;

TEST_CASE("vector helpers") {
  CHECK(dot({1, 2}, {3, -4}) == -5.0);
  CHECK(cross({1, 0}, {0, 1}) == 1.0);
  CHECK(norm({3, 4}) == 5.0);
  CHECK(Vec2{1, 2} + Vec2{3, 4} == Vec2{4, 6});
  CHECK(2.0 * Vec2{1, -1} == Vec2{2, -2});
}

TEST_CASE("ClosedCurve validation") {
  CHECK_THROWS_AS(ClosedCurve(std::vector<Vec2>(8)), std::invalid_argument);
  auto pts = seed_circle(1.0, 32).points();
  pts[5] = pts[4];
  CHECK_THROWS_AS(ClosedCurve{pts}, std::invalid_argument);
  pts = seed_circle(1.0, 32).points();
  pts[3].x = NAN;
  CHECK_THROWS_AS(ClosedCurve{pts}, std::invalid_argument);
  CHECK_THROWS_AS(seed_circle(0.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(seed_lemniscate(32), std::invalid_argument);
  CHECK_THROWS_AS(seed_clothoid(3.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(seed_ellipse(1.0, -1.0, 64), std::invalid_argument);
}

TEST_CASE("circle seed and its curvature") {
  const auto c = seed_circle(2.0, 128);
  double cx = 0, cy = 0;
  for (const auto& p : c.points()) {
    cx += p.x / 128;
    cy += p.y / 128;
  }
  for (const auto& p : c.points()) CHECK(std::abs(norm(p - Vec2{cx, cy}) - 0.5) <= 1e-12);
  const auto prof = curvature_profile(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(prof.k[i] == doctest::Approx(2.0).epsilon(1e-12));
    // left normal of a counter-clockwise circle points to the centre
    CHECK(dot(prof.normal[i], c[i]) == doctest::Approx(-0.5).epsilon(1e-12));
  }
  for (double v : normal_velocity(c)) CHECK(std::abs(v) < 1e-6 * 8);
  const auto m = curve_monitors(c);
  CHECK(m.signed_area > 0.0);
  CHECK(m.diameter == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curvature converges at second order on an ellipse") {
  // exact curvature of (a cos t, b sin t) is ab / (a^2 sin^2 + b^2 cos^2)^{3/2}
  auto err = [](std::size_t n) {
    const double a = 2.0, b = 1.0;
    std::vector<Vec2> pts;
    std::vector<double> exact;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2 * pi * i / n;
      pts.push_back({a * std::cos(t), b * std::sin(t)});
      exact.push_back(a * b / std::pow(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t), 1.5));
    }
    const auto prof = curvature_profile(ClosedCurve(pts));
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(prof.k[i] - exact[i]));
    return e;
  };
  const double e64 = err(64), e128 = err(128), e256 = err(256);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("circle curvature error does not grow with n") {
  auto err = [](std::size_t n) {
    const auto prof = curvature_profile(seed_circle(2.0, n));
    double e = 0.0;
    for (double k : prof.k) e = std::max(e, std::abs(k - 2.0));
    return e;
  };
  const double coarse = err(16);
  const double fine = err(1024);
  CHECK(coarse <= 1e-12);
  // only round-off remains, which grows mildly with n
  CHECK(fine <= 1e-10);
}

TEST_CASE("lemniscate seed") {
  CHECK(lemniscate_point(0.0).x == doctest::Approx(std::sqrt(6.0)));
  CHECK(lemniscate_point(0.0).y == 0.0);
  CHECK(std::abs(lemniscate_point(pi / 2).x) < 1e-15);
  CHECK(std::abs(lemniscate_point(pi / 2).y) < 1e-15);
  const auto c = seed_lemniscate(512);
  CHECK(c.size() == 512);
  // both symmetries, up to resampling
  const auto flip_x = [](Vec2 p) { return Vec2{-p.x, -p.y}; };
  const auto flip_y = [](Vec2 p) { return Vec2{p.x, -p.y}; };
  for (auto map : {+flip_x, +flip_y}) {
    std::vector<Vec2> img;
    for (const auto& p : c.points()) img.push_back(map(p));
    CHECK(hausdorff_distance(c, ClosedCurve(img)) < 1e-3);
  }
  const auto m = curve_monitors(c);
  CHECK(std::abs(m.signed_area) < 1e-10);
  CHECK(m.diameter == doctest::Approx(2 * std::sqrt(6.0)).epsilon(1e-4));
  // uniform arc length after resampling
  const auto prof = curvature_profile(c);
  const double mean = m.length / 512;
  for (std::size_t i = 1; i < 512; ++i) CHECK(prof.s[i] - prof.s[i - 1] == doctest::Approx(mean).epsilon(1e-2));
}

TEST_CASE("clothoid against adaptive Simpson") {
  for (double s : {-3.0, -1.3, 0.0, 0.4, 2.2, 3.0}) {
    const auto p = clothoid_point(s);
    const double x = testing::adaptive_simpson([](double u) { return std::cos(u * u / 2); }, 0.0, s);
    const double y = testing::adaptive_simpson([](double u) { return std::sin(u * u / 2); }, 0.0, s);
    CHECK(p.x == doctest::Approx(x).epsilon(1e-12).scale(1.0));
    CHECK(p.y == doctest::Approx(y).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("clothoid tangent angle is s^2/2 and it is an equilibrium") {
  const auto arc = seed_clothoid(3.0, 512);
  REQUIRE(arc.points.size() == 512);
  const double h = 6.0 / 511;
  for (std::size_t i = 1; i + 1 < arc.points.size(); ++i) {
    const double s = -3.0 + h * i;
    // centered chord direction is the tangent at s up to O(h^2) * curvature'
    const Vec2 d = arc.points[i + 1] - arc.points[i - 1];
    const double angle = std::atan2(d.y, d.x);
    CHECK(std::remainder(angle - s * s / 2, 2 * pi) == doctest::Approx(0.0).epsilon(1e-4).scale(1.0));
  }
  const auto prof = curvature_profile(arc);
  CHECK(std::isnan(prof.k.front()));
  CHECK(std::isnan(prof.k.back()));
  const auto V = normal_velocity(arc);
  double vmax = 0.0;
  for (std::size_t i = 2; i + 2 < V.size(); ++i) vmax = std::max(vmax, std::abs(V[i]));
  CHECK(vmax <= 1e-4);
  CHECK(std::isnan(V[1]));
}

TEST_CASE("normal velocity of k(s) = cos(2 pi s / L)") {
  const double L = 4.0, q = 2 * pi / L;
  const std::size_t n = 401;
  OpenArc arc;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = L * i / (n - 1);
    auto theta = [&](double u) { return std::sin(q * u) / q; };
    arc.points.push_back({testing::adaptive_simpson([&](double u) { return std::cos(theta(u)); }, 0.0, s),
                          testing::adaptive_simpson([&](double u) { return std::sin(theta(u)); }, 0.0, s)});
  }
  const auto V = normal_velocity(arc);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double s = L * i / (n - 1);
    CHECK(V[i] == doctest::Approx(q * q * std::cos(q * s)).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("resampling keeps the shape and equalizes edges") {
  const auto e = seed_ellipse(2.0, 1.0, 200);
  const auto r = resample_uniform(e, 300);
  CHECK(r.size() == 300);
  CHECK(hausdorff_distance(e, r) < 1e-3);
  CHECK(curve_monitors(r).length == doctest::Approx(curve_monitors(e).length).epsilon(1e-4));
  const auto prof = curvature_profile(r);
  for (std::size_t i = 1; i < 300; ++i) CHECK(prof.s[i] - prof.s[i - 1] == doctest::Approx(prof.s[1]).epsilon(1e-3));
}

TEST_CASE("hausdorff and normalized shape") {
  const auto a = seed_circle(1.0, 256);
  std::vector<Vec2> moved;
  for (const auto& p : a.points()) moved.push_back(3.0 * p + Vec2{5, -2});
  const ClosedCurve b(moved);
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(a, seed_circle(0.5, 256)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(hausdorff_distance(normalized_shape(a), normalized_shape(b)) < 1e-12);
  CHECK(curve_monitors(normalized_shape(b)).diameter == doctest::Approx(1.0));
}

TEST_CASE("flow options validation") {
  CurveFlowOptions o;
  CHECK_NOTHROW(o.validate());
  o.extinction_frac = 1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = {};
  o.resample_every = 0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = {};
  o.relative_dt = -1;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("circle is stationary under the flow") {
  CurveFlowOptions o;
  o.dt = 1e-4;
  o.t_end = 0.1;
  const auto c = seed_circle(2.0, 128);
  const auto res = flow(c, o);
  CHECK(res.outcome == CurveOutcome::Reached);
  CHECK(curve_outcome_name(res.outcome) == "reached");
  REQUIRE(res.frames.size() >= 2);
  CHECK(res.frames.front().t == 0.0);
  CHECK(res.frames.back().t == doctest::Approx(0.1));
  const auto m0 = res.frames.front().monitors, m1 = res.frames.back().monitors;
  CHECK(m1.signed_area == doctest::Approx(m0.signed_area).epsilon(1e-10));
  CHECK(m1.diameter == doctest::Approx(m0.diameter).epsilon(1e-10));
}

TEST_CASE("ellipse rounds up: length falls, area holds") {
  CurveFlowOptions o;
  o.dt = 1e-3;
  o.t_end = 0.5;
  const auto res = flow(seed_ellipse(2.0, 1.0, 128), o);
  REQUIRE(res.outcome == CurveOutcome::Reached);
  for (std::size_t j = 1; j < res.frames.size(); ++j) {
    CHECK(res.frames[j].monitors.length < res.frames[j - 1].monitors.length);
    CHECK(res.frames[j].monitors.signed_area ==
          doctest::Approx(res.frames[0].monitors.signed_area).epsilon(5e-3));
  }
}

TEST_CASE("lemniscate shrinks homothetically with diameter^4 linear in t") {
  // An exact shrinker X(t) = (1 - t/T)^{1/4} X(0); for this parametrization
  // T = a^4 / 24 with a = sqrt(6), so T = 3/2.
  CurveFlowOptions o;
  o.dt = 1e-4;
  o.t_end = 0.15;
  o.frame_interval = 0.05;
  const auto c0 = seed_lemniscate(256);
  const auto res = flow(c0, o);
  REQUIRE(res.outcome == CurveOutcome::Reached);
  const double d0 = std::pow(res.frames.front().monitors.diameter, 4);
  for (std::size_t j = 1; j < res.frames.size(); ++j) {
    const auto& f = res.frames[j];
    const double T = f.t * d0 / (d0 - std::pow(f.monitors.diameter, 4));
    CHECK(T == doctest::Approx(1.5).epsilon(0.02));
    CHECK(hausdorff_distance(normalized_shape(f.curve), normalized_shape(c0)) < 5e-3);
  }
}
