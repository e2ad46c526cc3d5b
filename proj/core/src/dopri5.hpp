#pragma once

// Dormand-Prince 5(4) with the 4th-order continuous extension of Hairer,
// Norsett & Wanner. Fixed-size state, signed step (integrates backwards when
// the initial step is negative).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace sdflow::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-10;
  double min_step = 1e-14;
  double max_step = 0.05;
};

template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec<N> r1{}, r2{}, r3{}, r4{}, r5{};

  double t1() const noexcept { return t0 + h; }

  Vec<N> operator()(double t) const noexcept {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
    }
    return out;
  }
};

enum class StepStatus { Accepted, Underflow, NonFinite };

template <std::size_t N, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, double t, const Vec<N>& y, double h0, StepControl control)
      : rhs_(std::move(rhs)), t_(t), y_(y), h_(h0), ctl_(control) {
    k1_ = rhs_(t_, y_);
  }

  double t() const noexcept { return t_; }
  const Vec<N>& y() const noexcept { return y_; }
  const DenseStep<N>& dense() const noexcept { return dense_; }

  StepStatus step() {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                            d4 = -10690763975.0 / 1880347072,
                            d5 = 701980252875.0 / 199316789632,
                            d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    const double dir = h_ < 0 ? -1.0 : 1.0;
    bool rejected = false;
    bool last_nonfinite = false;
    for (;;) {
      double h = dir * std::min(std::abs(h_), ctl_.max_step);
      if (std::abs(h) < ctl_.min_step) {
        return last_nonfinite ? StepStatus::NonFinite : StepStatus::Underflow;
      }
      Vec<N> tmp;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * k1_[i];
      const Vec<N> k2 = rhs_(t_ + c2 * h, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
      const Vec<N> k3 = rhs_(t_ + c3 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
      const Vec<N> k4 = rhs_(t_ + c4 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      const Vec<N> k5 = rhs_(t_ + c5 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                              a65 * k5[i]);
      const Vec<N> k6 = rhs_(t_ + h, tmp);
      Vec<N> ynew;
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y_[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      const Vec<N> k7 = rhs_(t_ + h, ynew);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
        const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y_[i]), std::abs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / static_cast<double>(N));

      if (!std::isfinite(err)) {
        last_nonfinite = true;
        rejected = true;
        h_ = 0.2 * h;
        continue;
      }
      last_nonfinite = false;

      if (err <= 1.0) {
        DenseStep<N> d;
        d.t0 = t_;
        d.h = h;
        for (std::size_t i = 0; i < N; ++i) {
          d.r1[i] = y_[i];
          d.r2[i] = ynew[i] - y_[i];
          d.r3[i] = h * k1_[i] - d.r2[i];
          d.r4[i] = d.r2[i] - h * k7[i] - d.r3[i];
          d.r5[i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                         d7 * k7[i]);
        }
        dense_ = d;
        t_ += h;
        y_ = ynew;
        k1_ = k7;
        double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        fac = std::clamp(fac, 0.2, rejected ? 1.0 : 5.0);
        h_ = h * fac;
        return StepStatus::Accepted;
      }
      rejected = true;
      h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }

 private:
  Rhs rhs_;
  double t_;
  Vec<N> y_;
  Vec<N> k1_{};
  double h_;
  StepControl ctl_;
  DenseStep<N> dense_{};
};

}  // namespace sdflow::detail
