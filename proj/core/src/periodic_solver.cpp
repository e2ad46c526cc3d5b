#include "sdflow/periodic_solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include "sdflow/geometry.hpp"

namespace sdflow {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct PeriodicBiharmonicSolver::Impl {
  std::size_t n;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t size) : n(size) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n);
    spectrum = fftw_alloc_complex(n / 2 + 1);
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spectrum, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum, real, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spectrum);
  }
};

PeriodicBiharmonicSolver::PeriodicBiharmonicSolver(std::size_t n) {
  if (n < 4) throw std::invalid_argument("PeriodicBiharmonicSolver: n must be >= 4");
  impl_ = std::make_unique<Impl>(n);
}

PeriodicBiharmonicSolver::~PeriodicBiharmonicSolver() = default;
PeriodicBiharmonicSolver::PeriodicBiharmonicSolver(PeriodicBiharmonicSolver&&) noexcept = default;
PeriodicBiharmonicSolver& PeriodicBiharmonicSolver::operator=(PeriodicBiharmonicSolver&&) noexcept =
    default;

std::size_t PeriodicBiharmonicSolver::size() const noexcept { return impl_->n; }

void PeriodicBiharmonicSolver::solve(std::span<double> x, double c, double h) {
  const std::size_t n = impl_->n;
  if (x.size() != n) throw std::invalid_argument("PeriodicBiharmonicSolver: size mismatch");
  if (!(c >= 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("PeriodicBiharmonicSolver: need c >= 0 and h > 0");
  }
  std::copy(x.begin(), x.end(), impl_->real);
  fftw_execute(impl_->forward);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t q = 0; q <= n / 2; ++q) {
    const double scale = inv_n / (1.0 + c * detail::biharmonic_symbol(q, n, h));
    impl_->spectrum[q][0] *= scale;
    impl_->spectrum[q][1] *= scale;
  }
  fftw_execute(impl_->backward);
  std::copy(impl_->real, impl_->real + n, x.begin());
}

}  // namespace sdflow
