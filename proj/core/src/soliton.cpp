#include "sdflow/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dopri5.hpp"
#include "finite_difference.hpp"

namespace sdflow {

namespace {

// Internal arc-length state: y, phi, theta, k, w, turn, aux.
//   turn = int k dS (signed turning since the initial point)
//   aux  = <X, N> = (phi - y psi)/v for self-similar profiles,
//          a sin(theta) - b cos(theta) = (a psi - b)/v for travelling waves.
// Carrying aux makes every line phi = A y an exact equilibrium: k stays
// identically zero instead of picking up rounding from phi - y psi.
enum Idx : std::size_t { kY, kPhi, kTheta, kK, kW, kTurn, kAux, kDim };
using Z = detail::Vec<kDim>;
using Dense = detail::DenseStep<kDim>;

struct ArcLengthRhs {
  SolitonKind kind;

  Z operator()(double /*S*/, const Z& z) const {
    const double c = std::cos(z[kTheta]);
    const double s = std::sin(z[kTheta]);
    Z d{};
    d[kY] = c;
    d[kPhi] = s;
    d[kTheta] = z[kK];
    d[kK] = z[kW];
    d[kTurn] = z[kK];
    if (std::holds_alternative<SelfSimilar>(kind)) {
      d[kW] = -0.25 * z[kAux];
      d[kAux] = -z[kK] * (z[kPhi] * s + z[kY] * c);
    } else if (const auto* tw = std::get_if<TravellingWave>(&kind)) {
      d[kW] = z[kAux];
      d[kAux] = z[kK] * (tw->a * c + tw->b * s);
    }
    return d;
  }
};

Z to_internal(const SolitonKind& kind, const ProfileState& s) {
  Z z{};
  z[kY] = s.y;
  z[kPhi] = s.phi;
  z[kTheta] = std::atan(s.psi);
  z[kK] = s.k;
  z[kW] = s.w;
  const double v = s.v();
  if (std::holds_alternative<SelfSimilar>(kind)) {
    z[kAux] = (s.phi - s.y * s.psi) / v;
  } else if (const auto* tw = std::get_if<TravellingWave>(&kind)) {
    z[kAux] = (tw->a * s.psi - tw->b) / v;
  }
  return z;
}

ProfileState to_profile(const Z& z, double S) {
  return ProfileState{z[kY], z[kPhi], std::tan(z[kTheta]), z[kK], z[kW], S};
}

bool all_finite(const Z& z) {
  return std::all_of(z.begin(), z.end(), [](double x) { return std::isfinite(x); });
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Bisection for the first point where pred holds, given !pred(lo), pred(hi).
// Returns the bracket end where pred holds.
template <class Pred>
double bisect_first(const Dense& D, double lo, double hi, double tol, Pred pred) {
  for (int it = 0; it < 200 && std::abs(hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (pred(D(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Emits the uniform y-lattice samples, plus extra samples wherever theta moves
// more than max_angle_increment between consecutive samples.
class Sampler {
 public:
  Sampler(const ProfileState& init, int direction, double budget, const IntegratorOptions& opts,
          std::vector<ProfileState>& out)
      : y0_(init.y),
        dir_(direction),
        budget_(budget),
        spacing_(opts.sample_spacing),
        max_dtheta_(opts.max_angle_increment),
        out_(out),
        last_S_(init.S),
        last_theta_(std::atan(init.psi)) {
    out_.push_back(init);
  }

  // Samples in (lo, hi] of the current dense step. hi itself is emitted only
  // if it is a lattice point.
  void advance(const Dense& D, double lo, double hi) {
    for (;;) {
      const double target = y0_ + dir_ * static_cast<double>(next_) * spacing_;
      if (std::abs(target - y0_) >= budget_ - 1e-9) break;
      if (dir_ * (D(hi)[kY] - target) < 0.0) break;
      const double S = solve_for_y(D, later(lo, last_S_), hi, target);
      refine(D, lo, S);
      emit(D, S);
      ++next_;
    }
    refine(D, lo, hi);
  }

  // Terminal sample at S.
  void finish(const Dense& D, double lo, double S) {
    refine(D, lo, S);
    if (S != last_S_) emit(D, S);
  }

 private:
  double later(double a, double b) const { return dir_ > 0 ? std::max(a, b) : std::min(a, b); }

  void emit(const Dense& D, double S) {
    const Z z = D(S);
    out_.push_back(to_profile(z, S));
    last_S_ = S;
    last_theta_ = z[kTheta];
  }

  // Inserts samples in (last sample, target) until the angle step to target
  // is within bounds.
  void refine(const Dense& D, double lo, double target) {
    for (int guard = 0; guard < 1000000; ++guard) {
      if (std::abs(D(target)[kTheta] - last_theta_) <= max_dtheta_) return;
      double a = later(lo, last_S_);
      double b = target;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        if (std::abs(D(mid)[kTheta] - last_theta_) > max_dtheta_) {
          b = mid;
        } else {
          a = mid;
        }
      }
      emit(D, a);
    }
  }

  // y is monotone in S along a graph: safeguarded Newton with dy/dS = cos(theta).
  double solve_for_y(const Dense& D, double lo, double hi, double target) const {
    double a = lo;  // dir * (y - target) < 0
    double b = hi;  // dir * (y - target) >= 0
    double S = hi;
    for (int it = 0; it < 100; ++it) {
      const Z z = D(S);
      const double g = z[kY] - target;
      if (std::abs(g) <= 1e-14 * std::max(1.0, std::abs(target))) return S;
      if (dir_ * g > 0.0) {
        b = S;
      } else {
        a = S;
      }
      const double next = S - g / std::cos(z[kTheta]);
      S = ((next - a) * (next - b) < 0.0) ? next : 0.5 * (a + b);
      if (std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(S))) return S;
    }
    return S;
  }

  double y0_;
  int dir_;
  double budget_;
  double spacing_;
  double max_dtheta_;
  std::vector<ProfileState>& out_;
  long next_ = 1;
  double last_S_;
  double last_theta_;
};

}  // namespace

double ProfileState::v() const noexcept { return std::hypot(1.0, psi); }

double ProfileState::theta() const noexcept { return std::atan(psi); }

bool ProfileState::finite() const noexcept {
  return std::isfinite(y) && std::isfinite(phi) && std::isfinite(psi) && std::isfinite(k) &&
         std::isfinite(w) && std::isfinite(S);
}

std::string_view kind_name(const SolitonKind& kind) noexcept {
  switch (kind.index()) {
    case 0:
      return "steady";
    case 1:
      return "selfsimilar";
    default:
      return "travelling";
  }
}

void validate_kind(const SolitonKind& kind) {
  if (const auto* tw = std::get_if<TravellingWave>(&kind)) {
    if (!std::isfinite(tw->a) || !std::isfinite(tw->b)) {
      throw std::invalid_argument("travelling wave direction must be finite");
    }
    if (tw->a == 0.0 && tw->b == 0.0) {
      throw std::invalid_argument("travelling wave needs a^2 + b^2 > 0");
    }
  }
}

ProfileDerivative vector_field(const SolitonKind& kind, const ProfileState& s) {
  const double v = s.v();
  ProfileDerivative d;
  d.dphi = s.psi;
  d.dpsi = s.k * v * v * v;
  d.dk = s.w * v;
  d.dS = v;
  d.dy = 1.0;
  if (std::holds_alternative<SelfSimilar>(kind)) {
    d.dw = -0.25 * (s.phi - s.y * s.psi);
  } else if (const auto* tw = std::get_if<TravellingWave>(&kind)) {
    d.dw = tw->a * s.psi - tw->b;
  } else {
    d.dw = 0.0;
  }
  return d;
}

std::string_view certificate_name(CertificateType t) noexcept {
  switch (t) {
    case CertificateType::GraphicalityLoss:
      return "graphicality_loss";
    case CertificateType::AngleExcess:
      return "angle_excess";
    case CertificateType::NonFinite:
      return "non_finite";
    case CertificateType::StepUnderflow:
      return "step_underflow";
  }
  return "unknown";
}

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Trivial:
      return "trivial";
    case Verdict::Breakdown:
      return "breakdown";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void IntegratorOptions::validate() const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(rtol) || !positive(atol)) {
    throw std::invalid_argument("integrator tolerances must be positive");
  }
  if (!positive(min_step) || !positive(max_step) || !positive(initial_step) ||
      min_step > max_step) {
    throw std::invalid_argument("integrator step bounds must be positive with min <= max");
  }
  if (!positive(slope_ceiling) || !positive(event_tolerance) || !positive(sample_spacing) ||
      !positive(max_angle_increment) || !positive(triviality_tolerance)) {
    throw std::invalid_argument("integrator options must be positive");
  }
}

IntegrationResult integrate(const SolitonKind& kind, const ProfileState& init, int direction,
                            double y_budget, const IntegratorOptions& opts) {
  validate_kind(kind);
  opts.validate();
  if (direction != 1 && direction != -1) {
    throw std::invalid_argument("direction must be +1 or -1");
  }
  if (!(std::isfinite(y_budget) && y_budget > 0.0)) {
    throw std::invalid_argument("y budget must be positive");
  }
  if (!init.finite()) throw std::invalid_argument("initial state must be finite");

  IntegrationResult result;
  result.trajectory.kind = kind;
  result.trajectory.direction = direction;
  result.trajectory.lattice_spacing = opts.sample_spacing;
  result.trajectory.lattice_origin = init.y;
  auto& samples = result.trajectory.samples;
  const double dir = direction;

  if (std::abs(init.psi) > opts.slope_ceiling) {
    samples.push_back(init);
    BreakdownCertificate c;
    c.type = CertificateType::GraphicalityLoss;
    c.y_event = init.y;
    c.direction = direction;
    c.slope = std::abs(init.psi);
    result.certificate = c;
    return result;
  }

  detail::StepControl ctl{opts.rtol, opts.atol, opts.min_step, opts.max_step};
  detail::Dopri5<kDim, ArcLengthRhs> stepper(ArcLengthRhs{kind}, init.S, to_internal(kind, init),
                                             dir * opts.initial_step, ctl);
  Sampler sampler(init, direction, y_budget, opts, samples);

  const double y0 = init.y;
  const double ceiling = opts.slope_ceiling;
  double turn_ref = 0.0;
  double y_ref = init.y;
  int k_sign = sign_of(init.k);

  enum class Hit { None, NonFinite, Graphicality, Angle, Budget };
  auto classify = [&](const Z& z, double ref) {
    if (!all_finite(z)) return Hit::NonFinite;
    if (std::abs(std::tan(z[kTheta])) > ceiling || std::abs(z[kTheta]) >= 0.5 * std::numbers::pi) {
      return Hit::Graphicality;
    }
    if (std::abs(z[kTurn] - ref) > std::numbers::pi) return Hit::Angle;
    if (dir * (z[kY] - y0) >= y_budget) return Hit::Budget;
    return Hit::None;
  };

  constexpr int kProbes = 8;
  for (;;) {
    const auto status = stepper.step();
    ++result.steps;
    if (status != detail::StepStatus::Accepted) {
      BreakdownCertificate c;
      c.type = status == detail::StepStatus::NonFinite ? CertificateType::NonFinite
                                                       : CertificateType::StepUnderflow;
      c.y_event = stepper.y()[kY];
      c.direction = direction;
      result.certificate = c;
      return result;
    }
    const Dense& D = stepper.dense();
    const double S0 = D.t0;
    const double S1 = D.t1();

    double prev = S0;
    for (int j = 1; j <= kProbes; ++j) {
      const double probe = (j == kProbes) ? S1 : S0 + (S1 - S0) * j / kProbes;

      // A sign change of k starts a new constant-sign interval for the monitor.
      struct Piece {
        double lo, hi;
      };
      Piece pieces[2] = {{prev, probe}, {probe, probe}};
      int n_pieces = 1;
      double new_ref = turn_ref;
      double new_y_ref = y_ref;
      int new_sign = k_sign;
      const Z zp = D(probe);
      const int sp = sign_of(zp[kK]);
      if (std::isfinite(zp[kK]) && sp != 0 && sp != k_sign) {
        if (k_sign != 0) {
          const int old = k_sign;
          const double Sz = bisect_first(D, prev, probe, opts.event_tolerance,
                                         [old](const Z& z) { return sign_of(z[kK]) != old; });
          const Z zz = D(Sz);
          pieces[0] = {prev, Sz};
          pieces[1] = {Sz, probe};
          n_pieces = 2;
          new_ref = zz[kTurn];
          new_y_ref = zz[kY];
        }
        new_sign = sp;
      }

      for (int p = 0; p < n_pieces; ++p) {
        const double ref = (p == 0) ? turn_ref : new_ref;
        const double lo = pieces[p].lo;
        const double hi = pieces[p].hi;
        const Hit hit = classify(D(hi), ref);
        if (hit != Hit::None) {
          const double Se = bisect_first(D, lo, hi, opts.event_tolerance, [&](const Z& z) {
            return classify(z, ref) != Hit::None;
          });
          const Z ze = D(Se);
          const Hit kind_hit = classify(ze, ref);
          if (kind_hit != Hit::NonFinite) sampler.finish(D, lo, Se);
          if (kind_hit == Hit::Budget) return result;
          BreakdownCertificate c;
          c.direction = direction;
          c.y_event = std::isfinite(ze[kY]) ? ze[kY] : samples.back().y;
          switch (kind_hit) {
            case Hit::NonFinite:
              c.type = CertificateType::NonFinite;
              break;
            case Hit::Graphicality:
              c.type = CertificateType::GraphicalityLoss;
              c.slope = std::abs(std::tan(ze[kTheta]));
              if (!(c.slope > ceiling)) c.slope = std::numeric_limits<double>::infinity();
              break;
            default:
              c.type = CertificateType::AngleExcess;
              c.turning = std::abs(ze[kTurn] - ref);
              c.interval_begin = std::min(p == 0 ? y_ref : new_y_ref, ze[kY]);
              c.interval_end = std::max(p == 0 ? y_ref : new_y_ref, ze[kY]);
              break;
          }
          result.certificate = c;
          return result;
        }
        sampler.advance(D, lo, hi);
      }
      turn_ref = new_ref;
      y_ref = new_y_ref;
      k_sign = new_sign;
      prev = probe;
    }
  }
}

std::vector<ProfileState> ClassificationReport::merged() const {
  const auto& b = backward.trajectory.samples;
  const auto& f = forward.trajectory.samples;
  std::vector<ProfileState> out;
  out.reserve(b.size() + f.size());
  for (auto it = b.rbegin(); it != b.rend(); ++it) out.push_back(*it);
  for (std::size_t i = b.empty() ? 0 : 1; i < f.size(); ++i) out.push_back(f[i]);
  return out;
}

Trajectory ClassificationReport::merged_trajectory() const {
  Trajectory t;
  t.kind = kind;
  t.direction = +1;
  t.lattice_spacing = forward.trajectory.lattice_spacing;
  t.lattice_origin = init.y;
  t.samples = merged();
  return t;
}

ClassificationReport shoot_bidirectional(const SolitonKind& kind, const ProfileState& init,
                                         double y_budget, const IntegratorOptions& opts) {
  ClassificationReport report;
  report.kind = kind;
  report.init = init;
  report.forward = integrate(kind, init, +1, y_budget, opts);
  report.backward = integrate(kind, init, -1, y_budget, opts);

  const auto all = report.merged();
  double turning = 0.0;
  double max_k = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    max_k = std::max(max_k, std::abs(all[i].k));
    if (i > 0) turning += std::abs(all[i].theta() - all[i - 1].theta());
  }
  report.max_abs_curvature = max_k;
  report.total_turning = turning;

  const auto& fc = report.forward.certificate;
  const auto& bc = report.backward.certificate;
  if (fc || bc) {
    report.verdict = Verdict::Breakdown;
    if (fc && bc) {
      report.certificate =
          std::abs(fc->y_event - init.y) <= std::abs(bc->y_event - init.y) ? fc : bc;
    } else {
      report.certificate = fc ? fc : bc;
    }
    return report;
  }

  // A constant-sign interval may straddle the initial point.
  const auto monitor = angle_monitor(all);
  if (monitor.max_turning > std::numbers::pi) {
    BreakdownCertificate c;
    c.type = CertificateType::AngleExcess;
    c.direction = +1;
    c.y_event = monitor.interval_end;
    c.interval_begin = monitor.interval_begin;
    c.interval_end = monitor.interval_end;
    c.turning = monitor.max_turning;
    report.verdict = Verdict::Breakdown;
    report.certificate = c;
    return report;
  }

  const double tol = opts.triviality_tolerance;
  report.verdict = (max_k <= tol && turning <= tol) ? Verdict::Trivial : Verdict::Inconclusive;
  return report;
}

AngleMonitorResult angle_monitor(std::span<const ProfileState> samples) {
  AngleMonitorResult best;
  if (samples.size() < 2) return best;
  double acc = 0.0;
  double begin = samples.front().y;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    const double dtheta = b.theta() - a.theta();
    if (sign_of(a.k) * sign_of(b.k) < 0) {
      const double t = a.k / (a.k - b.k);
      const double yz = a.y + t * (b.y - a.y);
      acc += t * dtheta;
      if (std::abs(acc) > best.max_turning) best = {std::abs(acc), begin, yz};
      begin = yz;
      acc = (1.0 - t) * dtheta;
    } else {
      acc += dtheta;
    }
    if (std::abs(acc) > best.max_turning) best = {std::abs(acc), begin, b.y};
  }
  if (best.interval_begin > best.interval_end) std::swap(best.interval_begin, best.interval_end);
  return best;
}

double redundant_derivative_check(std::span<const ProfileState> samples, double max_slope) {
  if (samples.size() < 5) {
    throw std::invalid_argument("redundant_derivative_check needs at least 5 samples");
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const auto& m = samples[i - 1];
    const auto& c = samples[i];
    const auto& p = samples[i + 1];
    if (std::abs(m.psi) > max_slope || std::abs(c.psi) > max_slope ||
        std::abs(p.psi) > max_slope || !detail::evenly_spaced(m.y, c.y, p.y)) {
      continue;
    }
    // Differenced in arc length, d/dy = v d/dS: the S-derivatives of the
    // profile stay bounded much longer as the slope grows.
    const double v = c.v();
    const double dpsi = v * detail::three_point_derivative(m.S, c.S, p.S, m.psi, c.psi, p.psi);
    const double dk = v * detail::three_point_derivative(m.S, c.S, p.S, m.k, c.k, p.k);
    worst = std::max({worst, std::abs(dpsi - c.k * v * v * v), std::abs(dk - c.w * v)});
  }
  return worst;
}

ProfileState sample_initial_state(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto unit = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(); };
  ProfileState s;
  s.phi = uniform(-2.0, 2.0);
  s.psi = uniform(-2.0, 2.0);
  do {
    s.k = uniform(-1.0, 1.0);
    s.w = uniform(-1.0, 1.0);
  } while (std::abs(s.k) + std::abs(s.w) < 1e-3);
  return s;
}

}  // namespace sdflow
