#include "sdflow/graph_pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sdflow/periodic_solver.hpp"

namespace sdflow {

void FlowConfig::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(std::isfinite(t_end) && t_end >= 0.0)) {
    throw std::invalid_argument("t_end must be non-negative");
  }
  if (!(stability_safety > 0.0 && stability_safety <= 1.0)) {
    throw std::invalid_argument("stability_safety must lie in (0, 1]");
  }
  if (frames == 0) throw std::invalid_argument("frames must be positive");
  if (!(slope_ceiling > 0.0)) throw std::invalid_argument("slope_ceiling must be positive");
}

StabilityError::StabilityError(double dt, double bound)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "explicit step dt = " << dt << " exceeds the stability bound " << bound;
        return os.str();
      }()),
      dt_(dt),
      bound_(bound) {}

double explicit_stability_bound(double h, double safety) noexcept {
  const double h2 = h * h;
  return safety * h2 * h2 / 8.0;
}

struct GraphStepper::Impl {
  explicit Impl(std::size_t n) : solver(n) {}
  PeriodicBiharmonicSolver solver;
};

GraphStepper::GraphStepper(std::size_t n) : impl_(std::make_unique<Impl>(n)) {}
GraphStepper::~GraphStepper() = default;
GraphStepper::GraphStepper(GraphStepper&&) noexcept = default;
GraphStepper& GraphStepper::operator=(GraphStepper&&) noexcept = default;

namespace {

void check_finite(std::span<const double> w) {
  for (double x : w) {
    if (!std::isfinite(x)) throw std::runtime_error("graph step produced non-finite values");
  }
}

std::vector<double> axpy(std::span<const double> x, double a, std::span<const double> y) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
  return out;
}

}  // namespace

GraphField GraphStepper::step(const GraphField& f, double dt, Scheme scheme,
                              double stability_safety) {
  const std::size_t n = f.size();
  if (n != impl_->solver.size()) throw std::invalid_argument("GraphStepper: grid size mismatch");
  const double h = f.spacing();
  const auto w = f.values();

  if (scheme == Scheme::ExplicitRK) {
    const double bound = explicit_stability_bound(h, stability_safety);
    if (dt > bound) throw StabilityError(dt, bound);
    auto rhs = [&f](std::vector<double> v) {
      const GraphField g = f.with_values(std::move(v));
      const GraphField l = surface_diffusion_operator(g);
      return std::vector<double>(l.values().begin(), l.values().end());
    };
    const auto k1 = rhs({w.begin(), w.end()});
    const auto k2 = rhs(axpy(w, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(w, 0.5 * dt, k2));
    const auto k4 = rhs(axpy(w, dt, k3));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = w[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(out);
    return f.with_values(std::move(out));
  }

  const GraphField l = surface_diffusion_operator(f);
  const auto d4 = detail::biharmonic(w, h);
  std::vector<double> rhs(n);
  const auto lv = l.values();
  for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] + dt * (lv[i] + d4[i]);
  impl_->solver.solve(rhs, dt, h);
  check_finite(rhs);
  return f.with_values(std::move(rhs));
}

GraphField step(const GraphField& f, const FlowConfig& cfg) {
  cfg.validate();
  GraphStepper stepper(f.size());
  return stepper.step(f, cfg.dt, cfg.scheme, cfg.stability_safety);
}

GraphMonitors graph_monitors(const GraphField& f, double t) {
  GraphMonitors m;
  m.t = t;
  const auto w = f.values();
  const std::size_t n = w.size();
  const double h = f.spacing();
  double sq = 0.0;
  double grad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dw = (w[(i + 1) % n] - w[i]) / h;
    m.max_slope = std::max(m.max_slope, std::abs(f.slope_offset() + dw));
    m.max_abs_w = std::max(m.max_abs_w, std::abs(w[i]));
    sq += w[i] * w[i];
    grad += dw * dw;
  }
  m.total_turning = total_turning(f);
  m.l2_norm = std::sqrt(h * sq);
  m.dirichlet = 0.5 * h * grad;
  return m;
}

namespace {

double max_half_slope(const GraphField& f) {
  const auto w = f.values();
  const std::size_t n = w.size();
  const double h = f.spacing();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m = std::max(m, std::abs(f.slope_offset() + (w[(i + 1) % n] - w[i]) / h));
  }
  return m;
}

}  // namespace

GraphEvolution evolve(const GraphField& f, const FlowConfig& cfg, bool keep_frames) {
  cfg.validate();
  GraphEvolution out{f, {}, {}};
  out.series.push_back(graph_monitors(f, 0.0));
  if (keep_frames) out.frames.push_back(f);
  if (cfg.t_end == 0.0) {
    out.dt_used = cfg.dt;
    return out;
  }

  const double frame_dt = cfg.t_end / static_cast<double>(cfg.frames);
  const auto per_frame = static_cast<std::size_t>(std::ceil(frame_dt / cfg.dt * (1.0 - 1e-12)));
  const std::size_t sub = std::max<std::size_t>(1, per_frame);
  const double dt = frame_dt / static_cast<double>(sub);
  out.dt_used = dt;

  auto lose = [&](double t, double slope) {
    out.graphicality_lost = true;
    out.abort_time = t;
    out.abort_slope = slope;
  };
  if (out.series.front().max_slope > cfg.slope_ceiling) {
    lose(0.0, out.series.front().max_slope);
    return out;
  }

  GraphStepper stepper(f.size());
  GraphField cur = f;
  for (std::size_t j = 1; j <= cfg.frames && !out.graphicality_lost; ++j) {
    for (std::size_t s = 0; s < sub; ++s) {
      try {
        cur = stepper.step(cur, dt, cfg.scheme, cfg.stability_safety);
      } catch (const std::invalid_argument&) {
        throw std::runtime_error("graph flow produced non-finite values at t = " +
                                 std::to_string(static_cast<double>(out.steps) * dt));
      }
      ++out.steps;
      const double slope = max_half_slope(cur);
      if (slope > cfg.slope_ceiling) {
        lose(static_cast<double>(out.steps) * dt, slope);
        break;
      }
    }
    const double t = out.graphicality_lost ? out.abort_time
                     : (j == cfg.frames)   ? cfg.t_end
                                           : static_cast<double>(j) * frame_dt;
    out.series.push_back(graph_monitors(cur, t));
    if (keep_frames) out.frames.push_back(cur);
  }
  out.final_field = cur;
  return out;
}

std::pair<GraphField, double> rescale(const GraphField& f, double t, const RescaleParams& p) {
  if (!(std::isfinite(p.lambda) && p.lambda > 0.0)) {
    throw std::invalid_argument("rescale: lambda must be positive and finite");
  }
  std::vector<double> values(f.values().begin(), f.values().end());
  for (double& v : values) v /= p.lambda;
  const double l2 = p.lambda * p.lambda;
  return {GraphField(f.domain_length() / p.lambda, f.slope_offset(), std::move(values)),
          t / (l2 * l2)};
}

}  // namespace sdflow
