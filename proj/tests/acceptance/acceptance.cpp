// Acceptance runner: one criterion per invocation, one PASS/FAIL line each.
//
//   sdflow_acceptance --criterion N      (N = 1..10, or 0 for all)
//
// Every tolerance lives in this file.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sdflow/certificates.hpp"
#include "sdflow/curve_flow.hpp"
#include "sdflow/graph_pde.hpp"
#include "sdflow/soliton.hpp"

using namespace sdflow;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const std::vector<SolitonKind>& sweep_kinds() {
  static const std::vector<SolitonKind> kinds{Steady{}, SelfSimilar{}, TravellingWave{1, 0},
                                              TravellingWave{1, 1}, TravellingWave{0, 1}};
  return kinds;
}

std::string label(const SolitonKind& k) {
  std::string s(kind_name(k));
  if (const auto* tw = std::get_if<TravellingWave>(&k)) {
    std::ostringstream os;
    os << s << "(" << tw->a << "," << tw->b << ")";
    return os.str();
  }
  return s;
}

IntegratorOptions identity_opts() {
  IntegratorOptions o;
  o.rtol = o.atol = 1e-12;
  o.sample_spacing = 1e-3;
  return o;
}

// ------------------------------------------------------------------------

void random_sweep(Outcome& r) {
  constexpr int kCount = 100;
  constexpr double kBudget = 200.0;
  constexpr double kMaxSeconds = 120.0;
  Stopwatch clock;
  for (const auto& kind : sweep_kinds()) {
    int breakdown = 0, trivial = 0, inconclusive = 0;
    for (int seed = 0; seed < kCount; ++seed) {
      const auto rep = shoot_bidirectional(kind, sample_initial_state(seed), kBudget);
      if (rep.verdict == Verdict::Breakdown && std::abs(rep.certificate->y_event) <= kBudget) ++breakdown;
      if (rep.verdict == Verdict::Trivial) ++trivial;
      if (rep.verdict == Verdict::Inconclusive) ++inconclusive;
    }
    r.detail << ' ' << label(kind) << ' ' << breakdown << '/' << kCount;
    r.require(breakdown == kCount && trivial == 0 && inconclusive == 0, label(kind) + " not all breakdown");
  }
  const double t = clock.seconds();
  r.detail << " time " << t << "s";
  r.require(t <= kMaxSeconds, "runtime");
}

void linear_equilibria(Outcome& r) {
  constexpr double kBudget = 100.0;
  constexpr double kMaxCurvature = 1e-9;
  double worst = 0.0;
  for (double A : {-2.0, 0.0, 1.0}) {
    for (const SolitonKind& kind : std::vector<SolitonKind>{Steady{}, SelfSimilar{}, TravellingWave{1.0, A}}) {
      const auto rep = shoot_bidirectional(kind, linear_state(A), kBudget);
      worst = std::max(worst, rep.max_abs_curvature);
      r.require(rep.verdict == Verdict::Trivial, label(kind) + " A=" + std::to_string(A) + " not trivial");
      const auto merged = rep.merged();
      r.require(merged.front().y <= -kBudget + 1e-9 && merged.back().y >= kBudget - 1e-9,
                "did not cover |y| <= 100");
    }
  }
  r.detail << " 9 runs, max|k| " << worst;
  r.require(worst <= kMaxCurvature, "curvature");
}

void case_one(Outcome& r) {
  constexpr double b = 0.5;
  constexpr double kMaxInterval = 1.1 * (2 * pi / b);
  const ProfileState init{0.0, 0.0, 0.0, b, 0.0, 0.0};
  const auto rep = shoot_bidirectional(Steady{}, init, 200.0);
  if (!rep.certificate) {
    r.require(false, "no certificate");
    return;
  }
  const auto& c = *rep.certificate;
  r.detail << " certificate " << certificate_name(c.type) << " at y=" << c.y_event;
  if (c.type == CertificateType::AngleExcess) {
    const double len = std::abs(c.interval_end - c.interval_begin);
    r.detail << " interval " << len << " (limit " << kMaxInterval << ")";
    r.require(len <= kMaxInterval, "interval length");
  } else {
    const auto am = angle_monitor(rep.merged());
    r.detail << "; max turning before the event " << am.max_turning << ", pi - turning " << pi - am.max_turning;
    r.require(false, "expected angle_excess");
  }
}

void identity_residuals(Outcome& r) {
  constexpr int kTrajectories = 10;
  constexpr double kMaxResidual = 1e-4;
  constexpr double kMinLhs = -1e-6;
  double worst_q = 0.0, worst_m = 0.0, min_lhs = INFINITY;
  std::size_t used = 0;
  const std::vector<TravellingWave> dirs{{1, 0}, {1, 1}, {0, 1}};
  for (int i = 0; i < kTrajectories; ++i) {
    const auto init = sample_initial_state(1000 + i);
    const auto ss = shoot_bidirectional(SelfSimilar{}, init, 200.0, identity_opts()).merged_trajectory();
    const auto q = convexity_residual_q(ss, q_paper_constants(init.phi));
    const TravellingWave tw = dirs[i % dirs.size()];
    const auto trav = shoot_bidirectional(tw, init, 200.0, identity_opts()).merged_trajectory();
    const auto m = convexity_residual_m(trav, tw.a, tw.b);
    r.require(q.samples_used > 0 && m.samples_used > 0, "empty stencil set");
    worst_q = std::max(worst_q, q.max_residual);
    worst_m = std::max(worst_m, m.max_residual);
    min_lhs = std::min({min_lhs, q.min_lhs, m.min_lhs});
    used += q.samples_used + m.samples_used;
  }
  r.detail << " Q max " << worst_q << ", M max " << worst_m << ", min lhs " << min_lhs << ", "
           << used << " stencils";
  r.require(worst_q <= kMaxResidual, "Q residual");
  r.require(worst_m <= kMaxResidual, "M residual");
  r.require(min_lhs >= kMinLhs, "nonnegativity");
}

void q_bound_check(Outcome& r) {
  constexpr double kSlack = 1e-9;
  double worst = -INFINITY;
  std::size_t used = 0, runs = 0;
  auto check = [&](const Trajectory& t) {
    const auto q = q_bound(t);
    worst = std::max(worst, q.max_excess);
    used += q.samples_used;
    ++runs;
  };
  for (int seed = 0; seed < 100; ++seed) {
    check(shoot_bidirectional(SelfSimilar{}, sample_initial_state(seed), 200.0).merged_trajectory());
  }
  for (int i = 0; i < 10; ++i) {
    check(shoot_bidirectional(SelfSimilar{}, sample_initial_state(1000 + i), 200.0, identity_opts())
              .merged_trajectory());
  }
  for (double A : {-2.0, 0.0, 1.0}) {
    check(shoot_bidirectional(SelfSimilar{}, linear_state(A), 100.0).merged_trajectory());
  }
  r.detail << ' ' << runs << " trajectories, " << used << " samples, max(Q - k^2) " << worst;
  r.require(worst <= kSlack, "Q exceeds k^2");
}

double sine_amplitude(const GraphField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::sin(2 * pi * f.x(i) / f.domain_length());
  return 2.0 * s / static_cast<double>(f.size());
}

void pde_decay(Outcome& r) {
  constexpr double kStepTol = 1e-12;
  constexpr double kRateTol = 0.05;
  constexpr double kMaxSeconds = 30.0;
  Stopwatch clock;
  double worst_step = 0.0;
  for (Scheme scheme : {Scheme::SemiImplicit, Scheme::ExplicitRK}) {
    GraphField line(2 * pi, 1.0, std::vector<double>(128, 0.0));
    GraphStepper stepper(128);
    const double dt = scheme == Scheme::ExplicitRK ? explicit_stability_bound(line.spacing(), 0.9) : 1e-3;
    for (int i = 0; i < 200; ++i) {
      auto next = stepper.step(line, dt, scheme);
      for (std::size_t j = 0; j < line.size(); ++j) worst_step = std::max(worst_step, std::abs(next[j] - line[j]));
      line = std::move(next);
    }
  }
  const auto f = GraphField::from_function(2 * pi, 0.0, 128, [](double x) { return 1e-3 * std::sin(x); });
  FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.frames = 8;
  const auto ev = evolve(f, cfg, false);
  const double rate = -std::log(sine_amplitude(ev.final_field) / sine_amplitude(f)) / cfg.t_end;
  const double t = clock.seconds();
  r.detail << " line drift/step " << worst_step << ", decay rate " << rate << " (exact 1), time " << t << "s";
  r.require(worst_step <= kStepTol, "line moved");
  r.require(std::abs(rate - 1.0) <= kRateTol, "decay rate");
  r.require(t <= kMaxSeconds, "runtime");
}

// max |rescale(evolve(f)) - evolve(rescale(f))| with the same dt on both sides
double commutation_gap(std::size_t n, double dt) {
  constexpr double lambda = 2.0;
  constexpr double t_end = 0.2;
  const auto f = GraphField::from_function(2 * pi, 0.3, n, [](double x) { return 0.3 * std::sin(x); });
  FlowConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.frames = 1;
  const auto lhs = rescale(evolve(f, cfg, false).final_field, t_end, {lambda});
  const auto g0 = rescale(f, 0.0, {lambda});
  FlowConfig scaled = cfg;
  scaled.t_end = lhs.second;
  const auto rhs = evolve(g0.first, scaled, false).final_field;
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(lhs.first[i] - rhs[i]));
  return gap;
}

void scaling_invariance(Outcome& r) {
  // Calibration run n = 512, dt = 1e-3 (dx^2 = 1.5e-4 << dt, so the dt term
  // dominates) recorded gap 1.849e-4, i.e. C = 0.160; pinned with headroom.
  constexpr double kC = 0.2;
  constexpr std::size_t kCalibN = 512;
  constexpr double kCalibDt = 1e-3;
  auto model = [](std::size_t n, double dt) {
    const double dx = 2 * pi / static_cast<double>(n);
    return dt + dx * dx;
  };
  const double calib = commutation_gap(kCalibN, kCalibDt) / model(kCalibN, kCalibDt);
  r.detail << " calibration C " << calib << " (pinned " << kC << ");";
  r.require(calib <= kC, "calibration drifted above the pinned C");
  double worst_ratio = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    double prev = 0.0;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
      const double gap = commutation_gap(n, dt);
      const double bound = kC * model(n, dt);
      worst_ratio = std::max(worst_ratio, gap / bound);
      r.detail << " n=" << n << " dt=" << dt << " gap " << gap << ';';
      r.require(gap <= bound, "gap above C(dt + dx^2)");
      if (prev > 0.0) r.require(prev / gap > 1.8, "gap does not shrink with dt");
      prev = gap;
    }
  }
  r.detail << " worst gap/bound " << worst_ratio;
}

void lemniscate(Outcome& r) {
  constexpr double kTextLo = 5.0, kTextHi = 7.0;
  constexpr double kHausdorff = 0.02;
  constexpr double kMinDiameterFrac = 0.1;
  constexpr double kMaxSeconds = 300.0;
  Stopwatch clock;
  const auto c0 = seed_lemniscate(512);
  const double d0 = curve_monitors(c0).diameter;
  CurveFlowOptions o;
  o.dt = 1e-4;
  o.relative_dt = 1e-4 / std::pow(d0, 4);
  o.t_end = 8.0;
  const auto res = flow(c0, o);
  const auto ref = normalized_shape(c0);
  double worst = 0.0, smallest = 1.0, max_area = 0.0;
  for (const auto& f : res.frames) {
    if (f.monitors.diameter < kMinDiameterFrac * d0) continue;
    worst = std::max(worst, hausdorff_distance(normalized_shape(f.curve), ref));
    smallest = std::min(smallest, f.monitors.diameter / d0);
    max_area = std::max(max_area, std::abs(f.monitors.signed_area));
  }
  const double t = clock.seconds();
  r.detail << ' ' << curve_outcome_name(res.outcome) << " t_ext " << res.t_ext << " (window [5, 7]), shape gap "
           << worst << " down to diameter " << smallest << ", max |area| " << max_area << ", " << res.steps
           << " steps, time " << t << "s";
  r.require(res.outcome == CurveOutcome::Extinct, "not extinct");
  r.require(res.t_ext >= kTextLo && res.t_ext <= kTextHi, "t_ext outside [5, 7]");
  r.require(worst <= kHausdorff, "shape");
  r.require(smallest <= kMinDiameterFrac + 0.05, "frames did not reach 10% diameter");
  r.require(t <= kMaxSeconds, "runtime");
}

double mean_radius(const ClosedCurve& c) {
  Vec2 m;
  for (const auto& p : c.points()) m = m + (1.0 / static_cast<double>(c.size())) * p;
  double r = 0.0;
  for (const auto& p : c.points()) r += norm(p - m) / static_cast<double>(c.size());
  return r;
}

void conservation(Outcome& r) {
  constexpr double kCircleDrift = 1e-3;
  constexpr double kEllipseArea = 5e-3;
  CurveFlowOptions o;
  o.dt = 1e-4;
  o.t_end = 1.0;
  const auto circle = flow(seed_circle(2.0, 512), o);
  const auto& first = circle.frames.front();
  double radius_drift = 0.0, area_drift = 0.0;
  for (const auto& f : circle.frames) {
    radius_drift = std::max(radius_drift, std::abs(mean_radius(f.curve) / mean_radius(first.curve) - 1));
    area_drift = std::max(area_drift, std::abs(f.monitors.signed_area / first.monitors.signed_area - 1));
  }
  r.detail << " circle: " << curve_outcome_name(circle.outcome) << " radius drift " << radius_drift
           << ", area drift " << area_drift;
  r.require(circle.outcome == CurveOutcome::Reached && circle.frames.back().t >= 1.0 - 1e-12, "circle run");
  r.require(radius_drift <= kCircleDrift && area_drift <= kCircleDrift, "circle drift");

  o.dt = 1e-3;
  o.t_end = 2.0;
  const auto ellipse = flow(seed_ellipse(2.0, 1.0, 256), o);
  bool decreasing = true;
  double e_area = 0.0;
  const double a0 = ellipse.frames.front().monitors.signed_area;
  for (std::size_t j = 1; j < ellipse.frames.size(); ++j) {
    decreasing = decreasing && ellipse.frames[j].monitors.length < ellipse.frames[j - 1].monitors.length;
    e_area = std::max(e_area, std::abs(ellipse.frames[j].monitors.signed_area / a0 - 1));
  }
  r.detail << "; ellipse: " << ellipse.frames.size() << " frames, length "
           << ellipse.frames.front().monitors.length << " -> " << ellipse.frames.back().monitors.length
           << (decreasing ? " strictly decreasing" : " NOT decreasing") << ", area drift " << e_area;
  r.require(ellipse.outcome == CurveOutcome::Reached, "ellipse run");
  r.require(decreasing, "ellipse length");
  r.require(e_area <= kEllipseArea, "ellipse area");
}

void equilibria(Outcome& r) {
  constexpr double kappa = 2.0;
  constexpr double kCircle = 1e-6 * kappa * kappa * kappa;
  constexpr double kClothoid = 1e-4;
  double vc = 0.0;
  for (double v : normal_velocity(seed_circle(kappa, 512))) vc = std::max(vc, std::abs(v));
  const auto V = normal_velocity(seed_clothoid(3.0, 512));
  double vk = 0.0;
  std::size_t interior = 0;
  for (double v : V) {
    if (std::isnan(v)) continue;
    vk = std::max(vk, std::abs(v));
    ++interior;
  }
  r.detail << " circle max speed " << vc << " (limit " << kCircle << "), clothoid max |V| " << vk << " over "
           << interior << " interior samples (limit " << kClothoid << ")";
  r.require(vc <= kCircle, "circle");
  r.require(vk <= kClothoid && interior >= 500, "clothoid");
}

struct Criterion {
  const char* name;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"random-data sweep breaks down", random_sweep},
      {"lines are trivial", linear_equilibria},
      {"steady constant-curvature angle certificate", case_one},
      {"Q and M convexity residuals", identity_residuals},
      {"Q bound with anchored constants", q_bound_check},
      {"graph flow stationarity and decay", pde_decay},
      {"parabolic scaling commutes with the flow", scaling_invariance},
      {"lemniscate extinction and self-similarity", lemniscate},
      {"circle and ellipse conservation", conservation},
      {"circle and clothoid equilibria", equilibria},
  };
  return all;
}

bool run_one(int n) {
  const auto& c = criteria()[static_cast<std::size_t>(n - 1)];
  Outcome r;
  try {
    c.run(r);
  } catch (const std::exception& e) {
    r.require(false, std::string("exception: ") + e.what());
  }
  std::printf("criterion %d: %s: %s:%s\n", n, r.pass ? "PASS" : "FAIL", c.name, r.detail.str().c_str());
  std::fflush(stdout);
  return r.pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdflow acceptance criteria"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "1..10, 0 runs all")->check(CLI::Range(0, 10));
  CLI11_PARSE(app, argc, argv);
  bool ok = true;
  if (criterion == 0) {
    for (int n = 1; n <= 10; ++n) ok = run_one(n) && ok;
  } else {
    ok = run_one(criterion);
  }
  return ok ? 0 : 1;
}
