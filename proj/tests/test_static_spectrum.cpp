#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "ebill/quadrature.hpp"
#include "ebill/static_spectrum.hpp"

using namespace ebill;

namespace {

const double kB0 = std::sqrt(0.51);

struct Row {
  double energy;
  MathieuKind kind;
  int l, r, pi_y, pi_x;
};

// Equilibrium ellipse a = 1, b = sqrt(0.51), energies below 50.
const Row kReference[] = {
    {4.267, MathieuKind::Even, 0, 1, 1, 1},   {9.058, MathieuKind::Even, 1, 1, 1, -1},
    {12.577, MathieuKind::Odd, 1, 1, -1, 1},  {15.993, MathieuKind::Even, 2, 1, 1, 1},
    {19.358, MathieuKind::Odd, 2, 1, -1, -1}, {25.061, MathieuKind::Even, 3, 1, 1, -1},
    {25.895, MathieuKind::Even, 0, 2, 1, 1},  {27.998, MathieuKind::Odd, 3, 1, -1, 1},
    {35.156, MathieuKind::Even, 1, 2, 1, -1}, {36.178, MathieuKind::Even, 4, 1, 1, 1},
    {38.511, MathieuKind::Odd, 4, 1, -1, -1}, {44.040, MathieuKind::Odd, 1, 2, -1, 1},
    {46.406, MathieuKind::Even, 2, 2, 1, 1},  {49.199, MathieuKind::Even, 5, 1, 1, -1},
};

// <f, g> over the ellipse on a scaled polar grid, independent of the
// elliptic-coordinate normalisation.
Eigen::MatrixXd gram(const std::vector<EllipticEigenstate>& states, const EllipseGeometry& g) {
  const QuadratureRule r = gauss_legendre(80, 0.0, 1.0);
  const int nphi = 240;
  Eigen::VectorXd x(r.size() * nphi), y(r.size() * nphi), w(r.size() * nphi);
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / nphi;
      const Eigen::Index p = i * nphi + j;
      x(p) = g.a * r.nodes(i) * std::cos(phi);
      y(p) = g.b * r.nodes(i) * std::sin(phi);
      w(p) = g.a * g.b * r.nodes(i) * r.weights(i) * 2.0 * std::numbers::pi / nphi;
    }
  }
  Eigen::MatrixXd values(x.size(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t s = 0; s < states.size(); ++s) values.col(Eigen::Index(s)) = evaluate_eigenstate(states[s], g, x, y);
  return values.transpose() * w.asDiagonal() * values;
}

}  // namespace

TEST_SUITE("static_spectrum") {
  TEST_CASE("equilibrium spectrum below E = 50") {
    const EllipseGeometry g(1.0, kB0);
    const auto states = solve_eigenstates(g, 50.0);
    REQUIRE(states.size() == 14);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const Row& ref = kReference[i];
      CAPTURE(i);
      CHECK(states[i].label == int(i) + 1);
      CHECK(std::abs(states[i].energy / ref.energy - 1.0) < 1e-3);
      CHECK(states[i].qn.kind == ref.kind);
      CHECK(states[i].qn.l == ref.l);
      CHECK(states[i].qn.r == ref.r);
      CHECK(states[i].symmetry.pi_y == ref.pi_y);
      CHECK(states[i].symmetry.pi_x == ref.pi_x);
      CHECK(boundary_residual(states[i], g) < 1e-10);
      CHECK(states[i].energy == doctest::Approx(g.energy_from_q(states[i].q)).epsilon(1e-14));
    }
  }

  TEST_CASE("classify_symmetry") {
    CHECK(classify_symmetry(MathieuKind::Even, 0) == Symmetry{1, 1});
    CHECK(classify_symmetry(MathieuKind::Odd, 2) == Symmetry{-1, -1});
    CHECK(classify_symmetry(MathieuKind::Even, 3) == Symmetry{-1, 1});
    CHECK(classify_symmetry(MathieuKind::Odd, 1) == Symmetry{1, -1});
  }

  TEST_CASE("circle limit ground state") {
    const EllipseGeometry g(1.0, 0.9999);
    const auto states = solve_eigenstates(g, 6.0);
    const double k = bessel_zero(0, 1);
    CHECK(states.front().energy == doctest::Approx(0.5 * k * k).epsilon(1e-3));
  }

  TEST_CASE("energies scale as 1/a^2 at fixed eccentricity") {
    const auto small = solve_eigenstates(EllipseGeometry(1.0, kB0), 30.0);
    const auto big = solve_eigenstates(EllipseGeometry(2.0, 2.0 * kB0), 30.0 / 4.0);
    REQUIRE(big.size() == small.size());
    for (std::size_t i = 0; i < big.size(); ++i) CHECK(std::abs(4.0 * big[i].energy / small[i].energy - 1.0) < 1e-10);
  }

  TEST_CASE("q-roots increase with r and the root count is stable") {
    const EllipseGeometry g(1.0, kB0);
    const auto states = solve_eigenstates(g, 120.0);
    for (const auto& a : states) {
      for (const auto& b : states) {
        if (a.qn.kind == b.qn.kind && a.qn.l == b.qn.l && a.qn.r < b.qn.r) CHECK(a.q < b.q);
      }
    }
    // Every (kind, l, r) below the bound is present exactly once, r consecutive from 1.
    std::map<std::pair<int, int>, std::vector<int>> families;
    for (const auto& s : states) families[{int(s.qn.kind), s.qn.l}].push_back(s.qn.r);
    for (auto& [key, rs] : families) {
      std::sort(rs.begin(), rs.end());
      for (std::size_t i = 0; i < rs.size(); ++i) CHECK(rs[i] == int(i) + 1);
    }
  }

  TEST_CASE("eigenfunctions: Dirichlet boundary and reflection parity") {
    const EllipseGeometry g(1.0, kB0);
    const auto states = solve_eigenstates(g, 50.0);
    for (const auto& s : states) {
      for (double t : {0.1, 0.9, 2.0, 4.0}) {
        CHECK(std::abs(evaluate_eigenstate(s, g, g.a * std::cos(t), g.b * std::sin(t))) < 1e-8);
      }
      const double x = 0.31, y = 0.22;
      const double v = evaluate_eigenstate(s, g, x, y);
      CHECK(evaluate_eigenstate(s, g, -x, y) == doctest::Approx(s.symmetry.pi_x * v).epsilon(1e-10));
      CHECK(evaluate_eigenstate(s, g, x, -y) == doctest::Approx(s.symmetry.pi_y * v).epsilon(1e-10));
    }
    CHECK_THROWS_AS(evaluate_eigenstate(states[0], g, 1.2, 0.0), DomainError);
  }

  TEST_CASE("eigenfunctions are orthonormal") {
    const EllipseGeometry g(1.0, kB0);
    const auto states = solve_eigenstates(g, 50.0);
    const Eigen::MatrixXd G = gram(states, g);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(G.rows(), G.cols());
    CHECK((G - I).cwiseAbs().maxCoeff() < 1e-7);
  }

  TEST_CASE("instantaneous spectrum tracks quantum numbers") {
    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    const SpectrumTracker tracker(d, 50.0);
    CHECK(tracker.energy_at(4, 0.25) < tracker.energy_at(4, 0.75));

    const auto frozen = instantaneous_spectrum(d.frozen(), 0.3, 50.0);
    const auto eq = solve_eigenstates(EllipseGeometry(1.0, kB0), 50.0);
    REQUIRE(frozen.size() == eq.size());
    for (std::size_t i = 0; i < eq.size(); ++i) CHECK(frozen[i].energy == doctest::Approx(eq[i].energy));

    // States 6 and 7 swap their energetic order within one period.
    bool below = false, above = false;
    for (int k = 0; k < 64; ++k) {
      const double diff = tracker.energy_at(7, k / 64.0) - tracker.energy_at(6, k / 64.0);
      (diff < 0 ? below : above) = true;
    }
    CHECK(below);
    CHECK(above);

    const auto sector = instantaneous_spectrum(d, 0.5, 50.0, Symmetry{1, 1});
    for (const auto& s : sector) CHECK(s.symmetry == Symmetry{1, 1});
  }

  TEST_CASE("mean energy difference of states 1 and 4") {
    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    const SpectrumTracker tracker(d, 20.0);
    CHECK(std::abs(mean_energy_difference(tracker, 1, 4) / 11.9227 - 1.0) < 5e-3);
    CHECK(mean_energy_difference(tracker, 1, 4) == doctest::Approx(mean_energy_difference(tracker, 4, 1)));
    CHECK_THROWS_AS(mean_energy_difference(tracker, 2, 2), DomainError);
  }
}
