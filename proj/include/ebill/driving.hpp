#pragma once

#include <cmath>
#include <numbers>

#include "ebill/errors.hpp"

namespace ebill {

/// Breathing-mode driving a(t) = a0 + c sin(w t), b(t) = b0 + c sin(w t).
class DrivingLaw {
 public:
  DrivingLaw(double a0, double b0, double amplitude, double omega)
      : a0_(a0), b0_(b0), c_(amplitude), omega_(omega) {
    if (!(a0 > b0) || !(b0 > 0.0)) throw DomainError("DrivingLaw: need a0 > b0 > 0");
    if (!(amplitude >= 0.0) || !(amplitude < b0)) throw DomainError("DrivingLaw: need 0 <= c < b0");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("DrivingLaw: need omega > 0");
  }

  double a0() const { return a0_; }
  double b0() const { return b0_; }
  double amplitude() const { return c_; }
  double omega() const { return omega_; }
  double period() const { return 2.0 * std::numbers::pi / omega_; }

  double a(double t) const { return a0_ + c_ * std::sin(omega_ * t); }
  double b(double t) const { return b0_ + c_ * std::sin(omega_ * t); }
  double a_dot(double t) const { return c_ * omega_ * std::cos(omega_ * t); }
  double b_dot(double t) const { return a_dot(t); }
  double a_ddot(double t) const { return -c_ * omega_ * omega_ * std::sin(omega_ * t); }
  double b_ddot(double t) const { return a_ddot(t); }

  /// Phase in units of the period, in [0, 1).
  double phase(double t) const {
    const double z = t / period();
    return z - std::floor(z);
  }
  /// Time within the first period for a phase zeta.
  double time_at_phase(double zeta) const { return zeta * period(); }

  /// Same law with zero amplitude (static equilibrium ellipse).
  DrivingLaw frozen() const { return {a0_, b0_, 0.0, omega_}; }
  DrivingLaw with_omega(double omega) const { return {a0_, b0_, c_, omega}; }

 private:
  double a0_;
  double b0_;
  double c_;
  double omega_;
};

}  // namespace ebill
