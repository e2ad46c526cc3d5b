#include "sdflow/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sdflow {

double speed(double psi) noexcept { return std::hypot(1.0, psi); }

double curvature_from_second_derivative(double psi, double phi_xx) noexcept {
  const double v = speed(psi);
  return phi_xx / (v * v * v);
}

double turning_angle(double psi_a, double psi_b) noexcept {
  return std::atan(psi_b) - std::atan(psi_a);
}

GraphField::GraphField(double domain_length, double slope_offset, std::vector<double> values)
    : length_(domain_length), slope_(slope_offset), values_(std::move(values)) {
  if (!(std::isfinite(length_) && length_ > 0.0)) {
    throw std::invalid_argument("GraphField: domain length must be positive and finite");
  }
  if (!std::isfinite(slope_)) {
    throw std::invalid_argument("GraphField: slope offset must be finite");
  }
  if (values_.size() < kMinSamples) {
    throw std::invalid_argument("GraphField: grid too coarse (n = " + std::to_string(values_.size()) +
                                ", need n >= 8)");
  }
  if (values_.size() % 2 != 0) {
    throw std::invalid_argument("GraphField: sample count must be even");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("GraphField: non-finite sample");
  }
}

GraphField GraphField::from_function(double domain_length, double slope_offset, std::size_t n,
                                     const std::function<double(double)>& w) {
  std::vector<double> values(n);
  const double h = domain_length / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = w(static_cast<double>(i) * h);
  return GraphField(domain_length, slope_offset, std::move(values));
}

GraphField GraphField::with_values(std::vector<double> values) const {
  return GraphField(length_, slope_, std::move(values));
}

std::vector<double> node_slopes(const GraphField& f) {
  const auto w = f.values();
  const std::size_t n = w.size();
  const double inv2h = 1.0 / (2.0 * f.spacing());
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    psi[i] = f.slope_offset() + (w[ip] - w[im]) * inv2h;
  }
  return psi;
}

GraphField surface_diffusion_operator(const GraphField& f) {
  const auto w = f.values();
  const std::size_t n = w.size();
  const double h = f.spacing();
  const double A = f.slope_offset();

  // k at nodes
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    const double psi = A + (w[ip] - w[im]) / (2.0 * h);
    const double wxx = (w[ip] - 2.0 * w[i] + w[im]) / (h * h);
    k[i] = curvature_from_second_derivative(psi, wxx);
  }

  // flux (1/v) dk/dx at half nodes i+1/2
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const double psi_half = A + (w[ip] - w[i]) / h;
    flux[i] = (k[ip] - k[i]) / (h * speed(psi_half));
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    out[i] = -(flux[i] - flux[im]) / h;
  }
  return GraphField(f.domain_length(), 0.0, std::move(out));
}

double total_turning(const GraphField& f) {
  const auto w = f.values();
  const std::size_t n = w.size();
  const double h = f.spacing();
  double total = 0.0;
  double prev = std::atan(f.slope_offset() + (w[0] - w[n - 1]) / h);
  for (std::size_t i = 0; i < n; ++i) {
    const double cur = std::atan(f.slope_offset() + (w[(i + 1) % n] - w[i]) / h);
    total += std::abs(cur - prev);
    prev = cur;
  }
  return total;
}

namespace detail {

std::vector<double> biharmonic(std::span<const double> w, double h) {
  const std::size_t n = w.size();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> d2(n), d4(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = (w[(i + 1) % n] - 2.0 * w[i] + w[(i + n - 1) % n]) * inv_h2;
  }
  for (std::size_t i = 0; i < n; ++i) {
    d4[i] = (d2[(i + 1) % n] - 2.0 * d2[i] + d2[(i + n - 1) % n]) * inv_h2;
  }
  return d4;
}

double biharmonic_symbol(std::size_t q, std::size_t n, double h) noexcept {
  const double s = std::sin(std::numbers::pi * static_cast<double>(q) / static_cast<double>(n));
  const double lap = 4.0 * s * s / (h * h);
  return lap * lap;
}

}  // namespace detail

}  // namespace sdflow
