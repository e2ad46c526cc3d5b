#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "sdflow/graph_pde.hpp"

using namespace sdflow;
using std::numbers::pi;

namespace {

GraphField sine(double A, double eps, std::size_t n, double L = 2 * pi, int mode = 1) {
  return GraphField::from_function(L, A, n, [=](double x) { return eps * std::sin(2 * pi * mode * x / L); });
}

// amplitude of the sin(x) mode by projection
double sine_amplitude(const GraphField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::sin(2 * pi * f.x(i) / f.domain_length());
  return 2.0 * s / static_cast<double>(f.size());
}

}  // namespace

TEST_CASE("a line does not move") {
  for (Scheme scheme : {Scheme::SemiImplicit, Scheme::ExplicitRK}) {
    const GraphField line(2 * pi, 1.0, std::vector<double>(64, 0.3));
    FlowConfig cfg;
    cfg.scheme = scheme;
    cfg.dt = scheme == Scheme::ExplicitRK ? explicit_stability_bound(line.spacing(), 0.9) : 1e-2;
    const auto next = step(line, cfg);
    for (std::size_t i = 0; i < line.size(); ++i) CHECK(std::abs(next[i] - line[i]) <= 1e-12);
    CHECK(next.slope_offset() == 1.0);
  }
}

TEST_CASE("small sine decays at the linearized rate") {
  // around the line of slope A the flow linearizes to w_t = -w_xxxx / (1 + A^2)^2
  for (double A : {0.0, 1.0}) {
    FlowConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.frames = 4;
    const auto f = sine(A, 1e-3, 128);
    const auto ev = evolve(f, cfg, false);
    const double rate = -std::log(sine_amplitude(ev.final_field) / sine_amplitude(f));
    CAPTURE(A);
    CHECK(rate == doctest::Approx(1.0 / std::pow(1 + A * A, 2)).epsilon(0.01));
  }
}

TEST_CASE("higher modes decay like q^4") {
  FlowConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.05;
  cfg.frames = 1;
  const auto f = sine(0.0, 1e-4, 128, 2 * pi, 2);
  const auto ev = evolve(f, cfg, false);
  double ratio = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > 5e-5) ratio = ev.final_field[i] / f[i];
  }
  CHECK(-std::log(ratio) / cfg.t_end == doctest::Approx(16.0).epsilon(0.02));
}

TEST_CASE("explicit scheme enforces its stability bound") {
  const auto f = sine(0.0, 0.1, 64);
  const double bound = explicit_stability_bound(f.spacing(), 0.5);
  CHECK(bound == doctest::Approx(0.5 * std::pow(f.spacing(), 4) / 8));
  GraphStepper stepper(64);
  try {
    stepper.step(f, 2 * bound, Scheme::ExplicitRK, 0.5);
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    CHECK(e.bound() == doctest::Approx(bound));
    CHECK(e.dt() == 2 * bound);
  }
  CHECK_NOTHROW(stepper.step(f, bound, Scheme::ExplicitRK, 0.5));
  GraphStepper wrong(32);
  CHECK_THROWS_AS(wrong.step(f, 1e-3, Scheme::SemiImplicit), std::invalid_argument);
}

TEST_CASE("both schemes converge to the same solution") {
  const auto f = sine(0.5, 0.2, 32);
  FlowConfig semi;
  semi.dt = 1e-6;
  semi.t_end = 5e-3;
  semi.frames = 1;
  FlowConfig rk = semi;
  rk.scheme = Scheme::ExplicitRK;
  rk.dt = explicit_stability_bound(f.spacing(), 0.9);
  const auto a = evolve(f, semi, false).final_field;
  const auto b = evolve(f, rk, false).final_field;
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-5).scale(0.2));
}

TEST_CASE("frames land on the requested times") {
  FlowConfig cfg;
  cfg.dt = 3e-3;
  cfg.t_end = 0.1;
  cfg.frames = 10;
  const auto ev = evolve(sine(0.0, 0.1, 32), cfg);
  REQUIRE(ev.frames.size() == 11);
  REQUIRE(ev.series.size() == 11);
  for (std::size_t j = 0; j < ev.series.size(); ++j) {
    CHECK(ev.series[j].t == doctest::Approx(0.01 * j).epsilon(1e-12));
  }
  CHECK(ev.dt_used <= 3e-3);
  CHECK(std::abs(0.01 / ev.dt_used - std::round(0.01 / ev.dt_used)) < 1e-9);
  CHECK(ev.steps == 40);
  CHECK_FALSE(ev.graphicality_lost);
  CHECK(evolve(sine(0.0, 0.1, 32), cfg, false).frames.empty());
}

TEST_CASE("the slope ceiling aborts the run") {
  FlowConfig cfg;
  cfg.slope_ceiling = 0.5;
  cfg.t_end = 0.01;
  const auto ev = evolve(sine(1.0, 0.1, 32), cfg);
  CHECK(ev.graphicality_lost);
  CHECK(ev.abort_slope > 0.5);
  CHECK(ev.abort_time == 0.0);
}

TEST_CASE("config validation") {
  FlowConfig cfg;
  cfg.dt = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.stability_safety = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.frames = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("monitors of a sine") {
  const double eps = 0.01;
  const auto m = graph_monitors(sine(0.0, eps, 256), 0.5);
  CHECK(m.t == 0.5);
  CHECK(m.l2_norm == doctest::Approx(eps * std::sqrt(pi)).epsilon(1e-10));
  CHECK(m.dirichlet == doctest::Approx(eps * eps * pi / 2).epsilon(1e-4));
  CHECK(m.max_abs_w == doctest::Approx(eps).epsilon(1e-3));
  CHECK(m.max_slope == doctest::Approx(eps).epsilon(1e-3));
}

TEST_CASE("parabolic rescaling") {
  const auto f = sine(0.7, 0.2, 64);
  const auto [g, t] = rescale(f, 1.6, {2.0});
  CHECK(t == doctest::Approx(0.1));
  CHECK(g.domain_length() == doctest::Approx(pi));
  CHECK(g.slope_offset() == 0.7);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i] / 2.0);
  CHECK_THROWS_AS(rescale(f, 0.0, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(rescale(f, 0.0, {-1.0}), std::invalid_argument);
}

TEST_CASE("rescaling commutes with the flow up to discretization error") {
  const double lambda = 2.0;
  const auto f = sine(0.3, 0.3, 64);
  FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;
  cfg.frames = 1;
  const auto [g_end, t_scaled] = rescale(evolve(f, cfg, false).final_field, cfg.t_end, {lambda});
  FlowConfig scaled = cfg;
  scaled.dt = cfg.dt / std::pow(lambda, 4);
  scaled.t_end = t_scaled;
  const auto [g0, t0] = rescale(f, 0.0, {lambda});
  CHECK(t0 == 0.0);
  const auto h_end = evolve(g0, scaled, false).final_field;
  double diff = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) diff = std::max(diff, std::abs(g_end[i] - h_end[i]));
  // The discrete schemes themselves are scale covariant: the grid, the step
  // and the operator all rescale together.
  CHECK(diff < 1e-10);
}
