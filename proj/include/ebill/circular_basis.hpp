#pragma once

#include <Eigen/Dense>

#include <complex>

#include "ebill/coupling_tables.hpp"

namespace ebill {

/// Radial factor R_{n,m}(r) = sqrt(2) J_m(k_{m,n} r) / J_{m+1}(k_{m,n}), same for +-m.
double circular_radial(const BesselZeroTable& zeros, int n, int m, double r);
double circular_radial_derivative(const BesselZeroTable& zeros, int n, int m, double r);

/// Polar product grid on the unit disk (Gauss-Legendre in r, uniform in phi)
/// with the circular basis Phi_{n,m} tabulated on it. Projects functions of
/// the lab frame onto the basis through the scaling (eta, xi) = (x/a, y/b)
/// and the quadratic phase S = (a' a eta^2 + b' b xi^2) / 2.
class CircularBasisGrid {
 public:
  static constexpr int kDefaultRadial = 96;
  static constexpr int kDefaultAngular = 256;

  explicit CircularBasisGrid(const BasisIndex& index, int radial_points = kDefaultRadial,
                             int angular_points = kDefaultAngular);

  const BasisIndex& index() const { return index_; }
  int radial_points() const { return static_cast<int>(r_.size()); }
  int angular_points() const { return static_cast<int>(phi_.size()); }
  Eigen::Index size() const { return r_.size() * phi_.size(); }

  /// Grid points (radial-major) mapped onto the ellipse with semi-axes a, b.
  void ellipse_points(double a, double b, Eigen::VectorXd& x, Eigen::VectorXd& y) const;

  /// W_b = sqrt(ab) * int_disk f(a eta, b xi) exp(iS) Phi_b d eta d xi for
  /// real samples f on ellipse_points(a, b). The overlap of a lab-frame
  /// state f with the state of coefficients c is then W . c, and the
  /// coefficients of f itself are conj(W).
  Eigen::VectorXcd project(const Eigen::VectorXd& samples, double a, double b, double a_dot, double b_dot) const;

  /// sum_b c_b Phi_b(r, phi).
  std::complex<double> basis_sum(const Eigen::VectorXcd& coeffs, double r, double phi) const;

 private:
  BasisIndex index_;
  BesselZeroTable zeros_;
  Eigen::VectorXd r_;
  Eigen::VectorXd radial_weight_;   // GL weight * r
  Eigen::VectorXd phi_;
  Eigen::MatrixXd radial_;          // (node, (|m|, n)) -> R_{n,|m|}(r)
  Eigen::MatrixXcd harmonics_;      // (phi, m + M) -> dphi e^{i m phi} / sqrt(2 pi)
};

}  // namespace ebill
