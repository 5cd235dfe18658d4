#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebill/driving.hpp"
#include "ebill/special_functions.hpp"

namespace ebill {

/// Ellipse x^2/a^2 + y^2/b^2 <= 1 with a > b > 0.
struct EllipseGeometry {
  double a;
  double b;

  EllipseGeometry(double a_, double b_) : a(a_), b(b_) {
    if (!(a > b) || !(b > 0.0) || !std::isfinite(a)) throw DomainError("EllipseGeometry: need a > b > 0");
  }

  /// Semi-focal distance.
  double focal() const { return std::sqrt(a * a - b * b); }
  /// Boundary value of the radial elliptic coordinate.
  double xi0() const { return std::atanh(b / a); }
  double eccentricity() const { return focal() / a; }

  /// Energy of a rescaled separation constant q (hbar = mu = 1).
  double energy_from_q(double q) const { return 2.0 * q / (a * a - b * b); }
  double q_from_energy(double e) const { return 0.5 * (a * a - b * b) * e; }

  static EllipseGeometry at(const DrivingLaw& d, double t) { return {d.a(t), d.b(t)}; }
};

/// Reflection parities: pi_x about the y-axis (x -> -x), pi_y about the x-axis.
struct Symmetry {
  int pi_x = 1;
  int pi_y = 1;

  friend bool operator==(const Symmetry&, const Symmetry&) = default;
};

Symmetry classify_symmetry(MathieuKind kind, int l);

struct QuantumNumbers {
  MathieuKind kind = MathieuKind::Even;
  int l = 0;
  int r = 1;

  friend bool operator==(const QuantumNumbers&, const QuantumNumbers&) = default;
  friend auto operator<=>(const QuantumNumbers& a, const QuantumNumbers& b) {
    if (auto c = static_cast<int>(a.kind) <=> static_cast<int>(b.kind); c != 0) return c;
    if (auto c = a.l <=> b.l; c != 0) return c;
    return a.r <=> b.r;
  }
};

std::string to_string(const QuantumNumbers& qn);

struct EllipticEigenstate {
  int label = 0;  ///< 1-based rank at the equilibrium geometry, 0 if unassigned.
  QuantumNumbers qn;
  Symmetry symmetry;
  double q = 0.0;
  double energy = 0.0;
  MathieuExpansion expansion;  ///< shared by the angular and radial factors
  double norm = 1.0;           ///< psi = norm * R(xi) * Theta(eta) has unit L2 norm
};

/// Failure to bracket a root of the boundary function of one (kind, l) family.
class RootBracketError : public NumericalError {
 public:
  RootBracketError(MathieuKind kind, int l, double q_lo, double q_hi);
  MathieuKind kind;
  int l;
  double q_lo;
  double q_hi;
};

/// All eigenstates with E <= e_max, energy ordered. Labels are set to the rank
/// in the returned list.
std::vector<EllipticEigenstate> solve_eigenstates(const EllipseGeometry& geom, double e_max);

/// The eigenstate with the given quantum numbers. `q_hint` (a root of a
/// nearby geometry) speeds up the bracket search; the radial zero count
/// certifies r either way.
EllipticEigenstate solve_eigenstate(const EllipseGeometry& geom, const QuantumNumbers& qn,
                                    std::optional<double> q_hint = std::nullopt);

/// Normalised amplitude at a Cartesian point; DomainError outside the ellipse.
double evaluate_eigenstate(const EllipticEigenstate& state, const EllipseGeometry& geom, double x, double y);

/// Amplitudes at many points; same contract as the scalar overload.
Eigen::VectorXd evaluate_eigenstate(const EllipticEigenstate& state, const EllipseGeometry& geom,
                                    const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// |psi| on the boundary relative to the amplitude scale of the radial series.
double boundary_residual(const EllipticEigenstate& state, const EllipseGeometry& geom);

/// Number of zeros of the radial factor in (0, xi0), excluding xi = 0.
int radial_interior_zeros(const MathieuExpansion& e, double xi0);

/// Equilibrium labels of a driving law and quantum-number tracking across phases.
class SpectrumTracker {
 public:
  /// Labels all equilibrium states with energy <= e_max.
  SpectrumTracker(const DrivingLaw& driving, double e_max);

  const DrivingLaw& driving() const { return driving_; }
  const std::vector<EllipticEigenstate>& equilibrium() const { return equilibrium_; }
  int size() const { return static_cast<int>(equilibrium_.size()); }

  const QuantumNumbers& quantum_numbers(int label) const;
  std::optional<int> label_of(const QuantumNumbers& qn) const;

  /// Eigenstate `label` of the ellipse frozen at phase zeta.
  EllipticEigenstate state_at(int label, double zeta) const;
  double energy_at(int label, double zeta) const { return state_at(label, zeta).energy; }

  /// Labels sharing a symmetry sector, ascending.
  std::vector<int> labels_with(const Symmetry& s) const;

 private:
  DrivingLaw driving_;
  std::vector<EllipticEigenstate> equilibrium_;
  std::map<QuantumNumbers, int> labels_;
};

/// Instantaneous eigenstates at phase zeta with E <= e_max (optionally one
/// symmetry sector). Labels follow the equilibrium numbering by quantum
/// numbers; states absent from the equilibrium list below e_max keep label 0.
std::vector<EllipticEigenstate> instantaneous_spectrum(const DrivingLaw& driving, double zeta, double e_max,
                                                       std::optional<Symmetry> filter = std::nullopt);

/// Phase average of |E_i(zeta) - E_j(zeta)|; the trapezoid grid is doubled
/// until the result changes by less than `tolerance`.
double mean_energy_difference(const SpectrumTracker& tracker, int label_i, int label_j,
                              double tolerance = 1e-4);

struct EnergyDifferenceRange {
  double min;
  double max;
};

/// Extremes of E_j(zeta) - E_i(zeta) over a uniform phase grid.
EnergyDifferenceRange energy_difference_range(const SpectrumTracker& tracker, int label_i, int label_j,
                                              int phases = 256);

}  // namespace ebill
