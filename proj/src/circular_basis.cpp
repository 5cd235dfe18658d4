#include "ebill/circular_basis.hpp"

#include <cmath>
#include <numbers>

#include "ebill/quadrature.hpp"

namespace ebill {

namespace {
constexpr double kPi = std::numbers::pi;
}

double circular_radial(const BesselZeroTable& zeros, int n, int m, double r) {
  const int o = std::abs(m);
  const double k = zeros(o, n);
  return std::sqrt(2.0) * bessel_j(o, k * r) / bessel_j(o + 1, k);
}

double circular_radial_derivative(const BesselZeroTable& zeros, int n, int m, double r) {
  const int o = std::abs(m);
  const double k = zeros(o, n);
  return std::sqrt(2.0) * k * bessel_j_derivative(o, k * r) / bessel_j(o + 1, k);
}

CircularBasisGrid::CircularBasisGrid(const BasisIndex& index, int radial_points, int angular_points)
    : index_(index), zeros_(index.M(), index.N()) {
  if (radial_points < 4 || angular_points < 2 * index.M() + 4) {
    throw DomainError("CircularBasisGrid: grid too coarse for the basis");
  }
  const int N = index.N();
  const int M = index.M();
  const QuadratureRule rule = gauss_legendre(radial_points, 0.0, 1.0);
  r_ = rule.nodes;
  radial_weight_ = rule.weights.cwiseProduct(rule.nodes);
  phi_ = Eigen::VectorXd::LinSpaced(angular_points, 0.0, 2.0 * kPi * (angular_points - 1) / angular_points);

  radial_.resize(radial_points, (M + 1) * N);
  std::vector<double> seq(static_cast<std::size_t>(M) + 2);
  for (int o = 0; o <= M; ++o) {
    for (int n = 1; n <= N; ++n) {
      const double k = zeros_(o, n);
      const double norm = std::sqrt(2.0) / bessel_j(o + 1, k);
      for (int i = 0; i < radial_points; ++i) {
        bessel_j_sequence(k * r_(i), seq);
        radial_(i, o * N + n - 1) = norm * seq[static_cast<std::size_t>(o)];
      }
    }
  }

  const double dphi = 2.0 * kPi / angular_points;
  harmonics_.resize(angular_points, 2 * M + 1);
  for (int j = 0; j < angular_points; ++j) {
    for (int m = -M; m <= M; ++m) {
      harmonics_(j, m + M) = std::polar(dphi / std::sqrt(2.0 * kPi), m * phi_(j));
    }
  }
}

void CircularBasisGrid::ellipse_points(double a, double b, Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  x.resize(size());
  y.resize(size());
  for (Eigen::Index i = 0; i < r_.size(); ++i) {
    for (Eigen::Index j = 0; j < phi_.size(); ++j) {
      const Eigen::Index p = i * phi_.size() + j;
      x(p) = a * r_(i) * std::cos(phi_(j));
      y(p) = b * r_(i) * std::sin(phi_(j));
    }
  }
}

Eigen::VectorXcd CircularBasisGrid::project(const Eigen::VectorXd& samples, double a, double b, double a_dot,
                                            double b_dot) const {
  if (samples.size() != size()) throw DomainError("CircularBasisGrid::project: sample count mismatch");
  const Eigen::Index nr = r_.size(), nphi = phi_.size();
  Eigen::MatrixXcd weighted(nr, nphi);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nphi; ++j) {
      const double eta = r_(i) * std::cos(phi_(j));
      const double xi = r_(i) * std::sin(phi_(j));
      const double s = 0.5 * (a_dot * a * eta * eta + b_dot * b * xi * xi);
      weighted(i, j) = samples(i * nphi + j) * std::polar(1.0, s);
    }
  }
  const Eigen::MatrixXcd angular = weighted * harmonics_;  // (node, m + M)

  const int N = index_.N();
  const int M = index_.M();
  const double scale = std::sqrt(a * b);
  Eigen::VectorXcd w(index_.size());
  for (int m = -M; m <= M; ++m) {
    const int o = std::abs(m);
    for (int n = 1; n <= N; ++n) {
      std::complex<double> sum = 0.0;
      for (Eigen::Index i = 0; i < nr; ++i) sum += radial_weight_(i) * radial_(i, o * N + n - 1) * angular(i, m + M);
      w(index_.linear(n, m)) = scale * sum;
    }
  }
  return w;
}

std::complex<double> CircularBasisGrid::basis_sum(const Eigen::VectorXcd& coeffs, double r, double phi) const {
  if (coeffs.size() != index_.size()) throw DomainError("CircularBasisGrid::basis_sum: coefficient size mismatch");
  const int N = index_.N();
  const int M = index_.M();
  std::vector<double> seq(static_cast<std::size_t>(M) + 1);
  std::complex<double> sum = 0.0;
  for (int n = 1; n <= N; ++n) {
    for (int o = 0; o <= M; ++o) {
      const double k = zeros_(o, n);
      bessel_j_sequence(k * r, seq);
      const double radial = std::sqrt(2.0) * seq[static_cast<std::size_t>(o)] / bessel_j(o + 1, k);
      for (int m : {o, -o}) {
        sum += coeffs(index_.linear(n, m)) * radial * std::polar(1.0 / std::sqrt(2.0 * kPi), m * phi);
        if (o == 0) break;
      }
    }
  }
  return sum;
}

}  // namespace ebill
