#pragma once

#include <Eigen/Dense>

namespace ebill {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// `panels` equal sub-intervals of [a, b], each with an n-point Gauss-Legendre rule.
QuadratureRule composite_gauss_legendre(int panels, int n, double a, double b);

/// Polar product grid on the unit disk: Gauss-Legendre in r times the
/// trapezoid rule in phi. Weights include the Jacobian r.
struct DiskGrid {
  Eigen::VectorXd r;       // per point
  Eigen::VectorXd phi;     // per point
  Eigen::VectorXd weight;  // per point
  int radial_points = 0;
  int angular_points = 0;

  Eigen::Index size() const { return r.size(); }
};

DiskGrid make_disk_grid(int radial_points, int angular_points);

}  // namespace ebill
