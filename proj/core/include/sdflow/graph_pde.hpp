#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sdflow/geometry.hpp"

namespace sdflow {

enum class Scheme { SemiImplicit, ExplicitRK };

struct FlowConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::SemiImplicit;
  double stability_safety = 0.9;  ///< ExplicitRK only
  std::size_t frames = 64;        ///< output frames after t = 0
  double slope_ceiling = 1e6;

  /// Throws std::invalid_argument on dt <= 0, t_end < 0, safety outside
  /// (0, 1] or zero frames.
  void validate() const;
};

/// Thrown when an explicit step exceeds dt <= safety * h^4 / 8.
class StabilityError : public std::runtime_error {
 public:
  StabilityError(double dt, double bound);
  double dt() const noexcept { return dt_; }
  double bound() const noexcept { return bound_; }

 private:
  double dt_;
  double bound_;
};

/// safety * h^4 / 8.
double explicit_stability_bound(double h, double safety) noexcept;

/// Advances u_t = L[u] on a fixed grid size; reuses FFT plans between steps.
///
/// SemiImplicit: (I + dt D4) w_new = w + dt (L[w] + D4 w), with D4 the compact
/// fourth difference, whose symbol dominates the linear part of L for every
/// background slope. First order in time.
/// ExplicitRK: classical RK4 on L.
class GraphStepper {
 public:
  explicit GraphStepper(std::size_t n);
  ~GraphStepper();
  GraphStepper(GraphStepper&&) noexcept;
  GraphStepper& operator=(GraphStepper&&) noexcept;

  /// Throws StabilityError (explicit scheme), std::invalid_argument on a size
  /// mismatch and std::runtime_error if the step produces non-finite values.
  GraphField step(const GraphField& f, double dt, Scheme scheme, double stability_safety = 0.9);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One step with a fresh stepper.
GraphField step(const GraphField& f, const FlowConfig& cfg);

struct GraphMonitors {
  double t = 0.0;
  double max_slope = 0.0;      ///< max |psi| over half nodes
  double total_turning = 0.0;  ///< see total_turning()
  double max_abs_w = 0.0;
  double l2_norm = 0.0;    ///< sqrt(h sum w^2)
  double dirichlet = 0.0;  ///< h/2 sum ((w_{i+1} - w_i)/h)^2
};

GraphMonitors graph_monitors(const GraphField& f, double t);

struct GraphEvolution {
  GraphField final_field;
  std::vector<GraphField> frames;  ///< frames[j] at series[j].t
  std::vector<GraphMonitors> series;
  double dt_used = 0.0;  ///< dt shrunk so frames land on steps
  std::size_t steps = 0;
  bool graphicality_lost = false;
  double abort_time = std::numeric_limits<double>::quiet_NaN();
  double abort_slope = std::numeric_limits<double>::quiet_NaN();
};

/// Steps to t_end with frames at j * t_end / frames. The time step is the
/// largest dt' <= dt that divides the frame interval. Aborts (flagging
/// graphicality_lost) when max |psi| exceeds the slope ceiling after a step.
/// Throws std::runtime_error if the field turns non-finite.
GraphEvolution evolve(const GraphField& f, const FlowConfig& cfg, bool keep_frames = true);

struct RescaleParams {
  double lambda = 1.0;
};

/// u^lambda(x, t) = u(lambda x, lambda^4 t) / lambda.
///
/// Given the field of u at time t, returns the field of u^lambda, which it
/// represents at time t / lambda^4. The grid keeps n samples on the cell
/// L / lambda, so the values are w_i / lambda with no interpolation; the
/// background slope is unchanged. Throws std::invalid_argument unless lambda
/// is positive and finite.
std::pair<GraphField, double> rescale(const GraphField& f, double t, const RescaleParams& p);

}  // namespace sdflow
