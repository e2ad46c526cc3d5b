#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sdflow {

/// Solves (I + c * D4) x = b on an n-point periodic grid, where D4 is the
/// compact fourth difference with spacing h (see detail::biharmonic). The
/// circulant system is diagonalized with a real FFT.
///
/// An instance owns its FFT plans and work buffers: not shareable between
/// threads, but independent instances may be used concurrently.
class PeriodicBiharmonicSolver {
 public:
  explicit PeriodicBiharmonicSolver(std::size_t n);
  ~PeriodicBiharmonicSolver();
  PeriodicBiharmonicSolver(PeriodicBiharmonicSolver&&) noexcept;
  PeriodicBiharmonicSolver& operator=(PeriodicBiharmonicSolver&&) noexcept;
  PeriodicBiharmonicSolver(const PeriodicBiharmonicSolver&) = delete;
  PeriodicBiharmonicSolver& operator=(const PeriodicBiharmonicSolver&) = delete;

  std::size_t size() const noexcept;

  /// In-place solve; `x` holds b on entry. Requires c >= 0, h > 0.
  void solve(std::span<double> x, double c, double h);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sdflow
