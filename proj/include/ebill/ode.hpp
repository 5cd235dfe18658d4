#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "ebill/errors.hpp"

namespace ebill {

struct OdeTolerances {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  long max_steps = 50'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;
};

/// Dormand-Prince 5(4) with FSAL and a standard step-size controller.
///
/// Integrates y' = f(t, y) from t0 through the sample times (monotone, in
/// either direction of time), landing exactly on each one and calling
/// observe(t, y) there. A sample equal to t0 is reported before stepping.
/// Throws NumericalError on step-size underflow or step-budget exhaustion.
template <class Vec, class Rhs, class Observer>
OdeStats integrate_dp45(Rhs&& f, double t0, Vec y, std::span<const double> samples, const OdeTolerances& tol,
                        Observer&& observe) {
  using std::abs;
  OdeStats stats;
  if (samples.empty()) return stats;
  const double dir = samples.back() >= t0 ? 1.0 : -1.0;

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto error_norm = [&](const Vec& err, const Vec& y0, const Vec& y1) {
    const auto scale = (tol.abs_tol + tol.rel_tol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
    return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
  };

  double t = t0;
  Vec k1 = f(t, y);
  ++stats.rhs_calls;

  // Initial step from the scale of y and y'.
  double h;
  {
    const auto scale = (tol.abs_tol + tol.rel_tol * y.cwiseAbs().array()).eval();
    const double d0 = std::sqrt((y.cwiseAbs().array() / scale).square().mean());
    const double d1 = std::sqrt((k1.cwiseAbs().array() / scale).square().mean());
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, abs(samples.back() - t0));
  }

  std::size_t next = 0;
  while (next < samples.size() && dir * (samples[next] - t) <= 0.0) {
    observe(samples[next], y);
    ++next;
  }

  Vec k2, k3, k4, k5, k6, k7, y_new;
  while (next < samples.size()) {
    const double target = samples[next];
    bool lands = false;
    double step = h;
    if (step >= abs(target - t)) {
      step = abs(target - t);
      lands = true;
    }
    const double hs = dir * step;
    if (step < 1e-14 * std::max(1.0, abs(t))) {
      throw NumericalError("integrate_dp45: step size underflow at t = " + std::to_string(t));
    }
    if (stats.accepted + stats.rejected >= tol.max_steps) {
      throw NumericalError("integrate_dp45: step budget exhausted at t = " + std::to_string(t));
    }

    k2 = f(t + c2 * hs, (y + hs * (a21 * k1)).eval());
    k3 = f(t + c3 * hs, (y + hs * (a31 * k1 + a32 * k2)).eval());
    k4 = f(t + c4 * hs, (y + hs * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    k5 = f(t + c5 * hs, (y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    k6 = f(t + hs, (y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7 = f(t + hs, y_new);
    stats.rhs_calls += 6;

    const Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, y_new);
    if (!std::isfinite(en)) throw NumericalError("integrate_dp45: non-finite state at t = " + std::to_string(t));

    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      ++stats.accepted;
      t = lands ? target : t + hs;
      y.swap(y_new);
      k1.swap(k7);
      if (!lands) h = step * factor;
      // Landing steps are often truncated; keep the controller's previous estimate.
      else h = std::max(h, step * factor);
      while (next < samples.size() && dir * (samples[next] - t) <= 0.0) {
        observe(samples[next], y);
        ++next;
      }
    } else {
      ++stats.rejected;
      h = step * std::max(0.2, factor);
    }
  }
  return stats;
}

}  // namespace ebill
