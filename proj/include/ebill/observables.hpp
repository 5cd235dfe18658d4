#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ebill/propagator.hpp"

namespace ebill {

/// Lab-frame energy <Psi|H(t)|Psi> as a quadratic form in the reduced state:
///   M(t) = g1 G1 + g3 G3 + a'^2 (G2 + G4) + b'^2 (G2 - G4) + (a'/a) D_eta + (b'/b) D_xi,
/// where the first two terms are the scaled kinetic energy, the middle two
/// are <eta^2>/2, <xi^2>/2 and D = (C - C^H) / 2i with C = <Phi| eta d_eta |Phi>
/// (resp. xi d_xi) comes from the quadratic phase of the unitary transform.
class EnergyOperator {
 public:
  EnergyOperator(const HamiltonianOperators& ops, const ReducedModel& model, int radial_panels = 32);

  Eigen::MatrixXcd matrix(double t, const DrivingLaw& driving) const;

  /// Real part of s^H M s; NumericalError if the imaginary residue exceeds 1e-9.
  double expectation(const Eigen::VectorXcd& s, double t, const DrivingLaw& driving) const;

  /// Full-basis dilation matrices C_eta, C_xi (for audits).
  const Eigen::MatrixXd& c_eta() const { return c_eta_; }
  const Eigen::MatrixXd& c_xi() const { return c_xi_; }

 private:
  const ReducedModel* model_;
  Eigen::MatrixXd c_eta_, c_xi_;        // full basis, real
  Eigen::MatrixXcd d_eta_, d_xi_;       // reduced
};

/// Psi(x, y, t) for a full-basis state: (ab)^{-1/2} e^{iS} sum_b c_b Phi_b(x/a, y/b).
std::vector<std::complex<double>> lab_wavefunction(const SpectralState& state, const DrivingLaw& driving,
                                                   const CircularBasisGrid& grid,
                                                   const std::vector<std::pair<double, double>>& points);

/// Overlaps of the evolving state with instantaneous eigenstates,
/// p_i = |<Psi_i(t)|Psi(t)>|. Overlap rows are tabulated on a grid of
/// `phases_per_period` phases; other times are projected on demand.
class PopulationProjector {
 public:
  PopulationProjector(const SpectrumTracker& tracker, std::vector<int> labels, const DrivingLaw& driving,
                      const ReducedModel& model, const CircularBasisGrid& grid, int phases_per_period = 64);

  const std::vector<int>& labels() const { return labels_; }
  int phases_per_period() const { return phases_; }

  /// p_i for every label at time t.
  Eigen::VectorXd populations(const Eigen::VectorXcd& reduced, double t) const;
  /// E_i(zeta(t)) for every label.
  Eigen::VectorXd energies(double t) const;

 private:
  struct Row {
    Eigen::MatrixXcd overlap;  // labels x K
    Eigen::VectorXd energy;    // labels
  };
  Row compute_row(double zeta) const;
  std::optional<int> grid_index(double t) const;

  const SpectrumTracker* tracker_;
  std::vector<int> labels_;
  DrivingLaw driving_;
  const ReducedModel* model_;
  const CircularBasisGrid* grid_;
  Eigen::MatrixXd embedding_;
  int phases_;
  std::vector<Row> rows_;
};

struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> energy;
  std::map<int, std::vector<double>> populations;
  std::vector<double> spectral_energy;  ///< sum_i E_i p_i^2 when populations are tracked
  std::vector<double> population_sum;   ///< sum_i p_i^2
  double e_max = 0.0;
  double e_min = 0.0;
  double omega = 0.0;
};

/// Energy (and optionally populations) at every trajectory sample.
ObservableSeries evaluate_observables(const Trajectory& trajectory, const DrivingLaw& driving,
                                      const EnergyOperator& energy, const PopulationProjector* projector = nullptr);

struct Extremes {
  double e_max;
  double e_min;
  bool under_sampled;  ///< fewer than 40 samples per driving period
};

Extremes extremal_energies(const ObservableSeries& series);

/// Slow period of p_label from a Hann-windowed spectrum restricted to
/// angular frequencies below omega/4; absent when no peak exceeds five
/// times the median amplitude (or 1e-5 absolute). The peak frequency is
/// refined by a parabola through the three largest neighbouring bins.
std::optional<double> beating_period(const ObservableSeries& series, int label);

}  // namespace ebill
