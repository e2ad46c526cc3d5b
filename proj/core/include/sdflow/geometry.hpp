#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sdflow {

/// Slope and height of a graph at one point.
struct GraphPoint {
  double psi = 0.0;  ///< dphi/dx
  double phi = 0.0;
};

/// v = sqrt(1 + psi^2). Always >= 1.
double speed(double psi) noexcept;
inline double speed(const GraphPoint& p) noexcept { return speed(p.psi); }

/// k = phi_xx / (1 + psi^2)^{3/2}.
double curvature_from_second_derivative(double psi, double phi_xx) noexcept;

/// arctan(psi_b) - arctan(psi_a); the change of tangent angle of a graph
/// between two points. Strictly inside (-pi, pi).
double turning_angle(double psi_a, double psi_b) noexcept;

/// Periodic perturbation of a line: u(x) = slope_offset * x + w(x), with w
/// sampled at x_i = i * L / n, i = 0..n-1.
class GraphField {
 public:
  static constexpr std::size_t kMinSamples = 8;

  /// Throws std::invalid_argument unless L > 0, n >= 8, n even and every
  /// sample (and the slope) is finite.
  GraphField(double domain_length, double slope_offset, std::vector<double> values);

  static GraphField from_function(double domain_length, double slope_offset, std::size_t n,
                                  const std::function<double(double)>& w);

  double domain_length() const noexcept { return length_; }
  double slope_offset() const noexcept { return slope_; }
  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return length_ / static_cast<double>(values_.size()); }
  double x(std::size_t i) const noexcept { return static_cast<double>(i) * spacing(); }

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Same cell and background slope, new perturbation samples.
  GraphField with_values(std::vector<double> values) const;

 private:
  double length_;
  double slope_;
  std::vector<double> values_;
};

/// Samples of L[u] = -d/dx( (1/v) d/dx k ) for u = A x + w.
///
/// Discretized in the factored form on the periodic grid: k at nodes from
/// centered first/second differences, d/dx k forward to half nodes where it
/// is weighted by 1/v evaluated from the half-node slope, and the outer d/dx
/// back to nodes. Second order in the spacing. The result carries the input
/// cell and zero background slope.
GraphField surface_diffusion_operator(const GraphField& f);

/// Node slopes psi_i = A + (w_{i+1} - w_{i-1}) / 2h.
std::vector<double> node_slopes(const GraphField& f);

/// Sum over half nodes of |arctan psi_{i+1/2} - arctan psi_{i-1/2}|.
double total_turning(const GraphField& f);

namespace detail {

/// (D2 D2 w)_i with D2 the compact periodic second difference; the positive
/// semi-definite discrete w_xxxx used as the implicit part of graph stepping.
std::vector<double> biharmonic(std::span<const double> w, double h);

/// Symbol of `biharmonic` on mode q of an n-point periodic grid.
double biharmonic_symbol(std::size_t q, std::size_t n, double h) noexcept;

}  // namespace detail

}  // namespace sdflow
