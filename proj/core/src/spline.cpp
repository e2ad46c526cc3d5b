#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "sdflow/curve_flow.hpp"

namespace sdflow {

namespace {

struct SplineDeleter {
  void operator()(gsl_spline* s) const noexcept { gsl_spline_free(s); }
};
struct AccelDeleter {
  void operator()(gsl_interp_accel* a) const noexcept { gsl_interp_accel_free(a); }
};

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGlX = {0.046910077030668, 0.230765344947158, 0.5,
                                        0.769234655052842, 0.953089922969332};
constexpr std::array<double, 5> kGlW = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                                        0.239314335249683, 0.118463442528095};

class PeriodicCurveSpline {
 public:
  explicit PeriodicCurveSpline(const std::vector<Vec2>& pts) {
    const std::size_t n = pts.size();
    u_.resize(n + 1);
    std::vector<double> xs(n + 1), ys(n + 1);
    u_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = pts[i].x;
      ys[i] = pts[i].y;
      u_[i + 1] = u_[i] + norm(pts[(i + 1) % n] - pts[i]);
    }
    xs[n] = pts[0].x;
    ys[n] = pts[0].y;
    sx_.reset(gsl_spline_alloc(gsl_interp_cspline_periodic, n + 1));
    sy_.reset(gsl_spline_alloc(gsl_interp_cspline_periodic, n + 1));
    acc_.reset(gsl_interp_accel_alloc());
    if (gsl_spline_init(sx_.get(), u_.data(), xs.data(), n + 1) != GSL_SUCCESS ||
        gsl_spline_init(sy_.get(), u_.data(), ys.data(), n + 1) != GSL_SUCCESS) {
      throw std::runtime_error("periodic spline construction failed");
    }
    // arc length at knots
    arc_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) arc_[i + 1] = arc_[i] + arc(u_[i], u_[i + 1]);
  }

  double total_length() const noexcept { return arc_.back(); }

  Vec2 at(double u) const {
    return {gsl_spline_eval(sx_.get(), u, acc_.get()), gsl_spline_eval(sy_.get(), u, acc_.get())};
  }

  double speed(double u) const {
    return std::hypot(gsl_spline_eval_deriv(sx_.get(), u, acc_.get()),
                      gsl_spline_eval_deriv(sy_.get(), u, acc_.get()));
  }

  double arc(double a, double b) const {
    double sum = 0.0;
    for (std::size_t q = 0; q < kGlX.size(); ++q) sum += kGlW[q] * speed(a + (b - a) * kGlX[q]);
    return sum * (b - a);
  }

  // Parameter at arc length sigma in [0, total).
  double parameter_at(double sigma) const {
    const auto it = std::upper_bound(arc_.begin(), arc_.end(), sigma);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - arc_.begin() - 1));
    i = std::min(i, u_.size() - 2);
    double lo = u_[i];
    double hi = u_[i + 1];
    const double target = sigma - arc_[i];
    double u = lo + (hi - lo) * target / std::max(arc_[i + 1] - arc_[i], 1e-300);
    for (int it2 = 0; it2 < 50; ++it2) {
      const double g = arc(u_[i], u) - target;
      if (g > 0.0) {
        hi = u;
      } else {
        lo = u;
      }
      const double next = u - g / speed(u);
      const double prev = u;
      u = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
      if (std::abs(u - prev) <= 1e-15 * std::max(1.0, u_.back())) break;
    }
    return u;
  }

 private:
  std::vector<double> u_;
  std::vector<double> arc_;
  std::unique_ptr<gsl_spline, SplineDeleter> sx_, sy_;
  std::unique_ptr<gsl_interp_accel, AccelDeleter> acc_;
};

}  // namespace

ClosedCurve resample_uniform(const ClosedCurve& c, std::size_t n) {
  if (n < ClosedCurve::kMinPoints) throw std::invalid_argument("resample_uniform: n too small");
  const PeriodicCurveSpline spline(c.points());
  const double total = spline.total_length();
  std::vector<Vec2> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double sigma = total * static_cast<double>(j) / static_cast<double>(n);
    out[j] = spline.at(spline.parameter_at(sigma));
  }
  return ClosedCurve(std::move(out), c.time());
}

}  // namespace sdflow
