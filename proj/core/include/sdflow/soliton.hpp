#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sdflow {

/// State of a soliton profile ODE at one abscissa y.
///
/// k and w are carried as independent unknowns of the first-order reduction;
/// they agree with (d^2 phi/dy^2)/v^3 and (1/v) dk/dy only through the ODE.
/// S is the signed arc length accumulated from the initial point.
struct ProfileState {
  double y = 0.0;
  double phi = 0.0;
  double psi = 0.0;  ///< dphi/dy
  double k = 0.0;    ///< curvature
  double w = 0.0;    ///< (1/v) dk/dy
  double S = 0.0;    ///< int_{y0}^{y} v

  double v() const noexcept;
  double theta() const noexcept;  ///< arctan(psi)
  bool finite() const noexcept;
};

/// d/dy of (phi, psi, k, w, S, y).
struct ProfileDerivative {
  double dphi = 0.0;
  double dpsi = 0.0;
  double dk = 0.0;
  double dw = 0.0;
  double dS = 0.0;
  double dy = 1.0;
};

struct Steady {};
struct SelfSimilar {};
/// u(x, t) = phi(x - a t) + b t.
struct TravellingWave {
  double a = 0.0;
  double b = 0.0;
};

using SolitonKind = std::variant<Steady, SelfSimilar, TravellingWave>;

/// "steady", "selfsimilar" or "travelling".
std::string_view kind_name(const SolitonKind& kind) noexcept;

/// Throws std::invalid_argument for a travelling wave with a = b = 0.
void validate_kind(const SolitonKind& kind);

/// Right-hand side of the reduced profile system in the graph variable y:
/// phi' = psi, psi' = k v^3, k' = w v, S' = v and
///   w' = 0                   (steady)
///   w' = -(phi - y psi) / 4  (self-similar)
///   w' = a psi - b           (travelling wave)
ProfileDerivative vector_field(const SolitonKind& kind, const ProfileState& s);

enum class CertificateType { GraphicalityLoss, AngleExcess, NonFinite, StepUnderflow };

std::string_view certificate_name(CertificateType t) noexcept;

/// Evidence that a trajectory cannot be continued as an entire graph.
struct BreakdownCertificate {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  CertificateType type = CertificateType::GraphicalityLoss;
  double y_event = kUnset;
  int direction = +1;
  double slope = kUnset;           ///< GraphicalityLoss: |psi| at the event
  double interval_begin = kUnset;  ///< AngleExcess: y range of the constant-sign interval
  double interval_end = kUnset;
  double turning = kUnset;  ///< AngleExcess: |int k v dy| over the interval
};

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double min_step = 1e-14;
  double max_step = 0.05;
  double initial_step = 1e-4;
  double slope_ceiling = 1e6;
  double event_tolerance = 1e-9;      ///< bisection width for events
  double sample_spacing = 1e-2;       ///< uniform y lattice of the trajectory
  double max_angle_increment = 0.01;  ///< max |theta| change between samples
  double triviality_tolerance = 1e-9;

  /// Throws std::invalid_argument on non-positive tolerances or sizes.
  void validate() const;
};

struct Trajectory {
  SolitonKind kind;
  int direction = +1;
  double lattice_spacing = 0.0;  ///< y spacing of the uniform samples; 0 if unknown
  double lattice_origin = 0.0;   ///< y of the initial state
  std::vector<ProfileState> samples;  ///< in integration order, samples[0] = init
};

struct IntegrationResult {
  Trajectory trajectory;
  std::optional<BreakdownCertificate> certificate;  ///< empty: budget reached
  std::size_t steps = 0;

  bool completed() const noexcept { return !certificate.has_value(); }
};

/// Integrates one direction (+1 or -1) until |y - y0| = y_budget or breakdown.
///
/// Stepping is adaptive Dormand-Prince in arc length, so the integration
/// reaches the slope ceiling without the step collapse a y-parametrized solver
/// suffers as psi blows up; all reported states are graph states. Events are
/// localized by bisection on the dense output.
IntegrationResult integrate(const SolitonKind& kind, const ProfileState& init, int direction,
                            double y_budget, const IntegratorOptions& opts = {});

enum class Verdict { Trivial, Breakdown, Inconclusive };

std::string_view verdict_name(Verdict v) noexcept;

struct ClassificationReport {
  SolitonKind kind;
  ProfileState init;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<BreakdownCertificate> certificate;
  IntegrationResult forward;
  IntegrationResult backward;
  double max_abs_curvature = 0.0;
  double total_turning = 0.0;

  /// Both directions as one trajectory in ascending y.
  std::vector<ProfileState> merged() const;
  Trajectory merged_trajectory() const;
};

/// Integrates both directions and classifies the profile:
/// Trivial if both complete with max|k| and total turning below the
/// triviality tolerance, Breakdown if either direction certifies,
/// Inconclusive otherwise.
ClassificationReport shoot_bidirectional(const SolitonKind& kind, const ProfileState& init,
                                         double y_budget, const IntegratorOptions& opts = {});

struct AngleMonitorResult {
  double max_turning = 0.0;  ///< max |int k v dy| over constant-sign intervals
  double interval_begin = 0.0;
  double interval_end = 0.0;
};

/// Tangent turning int k v dy = sum of arctan(psi) increments over maximal
/// intervals on which k keeps its sign, split at the linear zero of k.
/// Samples must be ordered along the curve.
AngleMonitorResult angle_monitor(std::span<const ProfileState> samples);

/// Max over interior samples of |D psi - k v^3| and |D k - w v|, with
/// D = v D_S and D_S the three-point centered difference in arc length.
/// Only evenly spaced (lattice) stencils count; stencils touching
/// |psi| > max_slope are skipped. Throws for fewer than 5 samples.
double redundant_derivative_check(std::span<const ProfileState> samples,
                                  double max_slope = std::numeric_limits<double>::infinity());

/// Random non-trivial initial data at y = 0: phi, psi uniform in [-2, 2],
/// k, w uniform in [-1, 1], redrawn while |k| + |w| < 1e-3.
ProfileState sample_initial_state(std::uint64_t seed);

/// Line phi = A y through the origin.
inline ProfileState linear_state(double A) { return ProfileState{0.0, 0.0, A, 0.0, 0.0, 0.0}; }

}  // namespace sdflow
