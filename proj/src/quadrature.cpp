#include "ebill/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "ebill/errors.hpp"

namespace ebill {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  QuadratureRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(i) = mid - half * x;
    rule.nodes(n - 1 - i) = mid + half * x;
    rule.weights(i) = half * w;
    rule.weights(n - 1 - i) = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int panels, int n, double a, double b) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: need at least one panel");
  const QuadratureRule base = gauss_legendre(n);
  QuadratureRule rule{Eigen::VectorXd(panels * n), Eigen::VectorXd(panels * n)};
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int i = 0; i < n; ++i) {
      rule.nodes(p * n + i) = lo + 0.5 * width * (base.nodes(i) + 1.0);
      rule.weights(p * n + i) = 0.5 * width * base.weights(i);
    }
  }
  return rule;
}

DiskGrid make_disk_grid(int radial_points, int angular_points) {
  if (angular_points < 1) throw DomainError("make_disk_grid: need angular points");
  const QuadratureRule radial = gauss_legendre(radial_points, 0.0, 1.0);
  DiskGrid g;
  g.radial_points = radial_points;
  g.angular_points = angular_points;
  const Eigen::Index n = static_cast<Eigen::Index>(radial_points) * angular_points;
  g.r.resize(n);
  g.phi.resize(n);
  g.weight.resize(n);
  const double dphi = 2.0 * std::numbers::pi / angular_points;
  for (int i = 0; i < radial_points; ++i) {
    for (int j = 0; j < angular_points; ++j) {
      const Eigen::Index p = static_cast<Eigen::Index>(i) * angular_points + j;
      g.r(p) = radial.nodes(i);
      g.phi(p) = j * dphi;
      g.weight(p) = radial.weights(i) * radial.nodes(i) * dphi;
    }
  }
  return g;
}

}  // namespace ebill
