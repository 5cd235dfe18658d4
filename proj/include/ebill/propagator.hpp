#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "ebill/circular_basis.hpp"
#include "ebill/coupling_tables.hpp"
#include "ebill/driving.hpp"
#include "ebill/ode.hpp"
#include "ebill/spectral_basis.hpp"
#include "ebill/static_spectrum.hpp"

namespace ebill {

/// Time-dependent factors of the coupling decomposition (hbar = mu = 1):
/// g1 = -1/a^2 - 1/b^2, g2 = a a'' + b b'', g3 = 1/a^2 - 1/b^2, g4 = a a'' - b b''.
struct GValues {
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double g4 = 0.0;
};

GValues g_functions(double t, const DrivingLaw& driving);
/// The g-values of a frozen ellipse (no acceleration).
GValues g_functions_static(double a, double b);

/// Full-basis operators with H(t) = g1 A1 + g2 A2 + g3 A3 + g4 A4.
struct HamiltonianOperators {
  BasisIndex index{1, 0};
  std::array<Eigen::MatrixXd, 4> A;

  Eigen::MatrixXd at(const GValues& g) const { return g.g1 * A[0] + g.g2 * A[1] + g.g3 * A[2] + g.g4 * A[3]; }
};

HamiltonianOperators assemble_operators(const CouplingTable& table,
                                        OperatorConvention convention = OperatorConvention::Consistent);

/// c' = -i H(t) c in the full circular basis.
Eigen::VectorXcd rhs(double t, const Eigen::VectorXcd& c, const HamiltonianOperators& ops, const DrivingLaw& driving);

/// Coefficients c_{n,m} over the full basis at time t.
struct SpectralState {
  Eigen::VectorXcd coeffs;
  double t = 0.0;
};

/// Galerkin model on the lowest eigenvectors of the equilibrium Hamiltonian
/// inside an invariant subspace of the circular basis.
///
/// With E = projector * modes (full_dim x K), H_ref = diag(levels) and
/// G_k = E^T A_k E, the reduced state s obeys i s' = (sum_k g_k(t) G_k) s.
struct ReducedModel {
  SpectralBasis basis;
  Eigen::MatrixXd modes;   ///< basis.dim() x K
  Eigen::VectorXd levels;  ///< eigenvalues of H_ref, ascending
  std::array<Eigen::MatrixXd, 4> G;
  GValues reference;
  double energy_cutoff = 0.0;

  int dim() const { return static_cast<int>(levels.size()); }
  Eigen::MatrixXd embedding() const { return basis.projector * modes; }
  Eigen::MatrixXd hamiltonian(const GValues& g) const {
    return g.g1 * G[0] + g.g2 * G[1] + g.g3 * G[2] + g.g4 * G[3];
  }
  Eigen::VectorXcd to_full(const Eigen::VectorXcd& s) const;
  Eigen::VectorXcd from_full(const Eigen::VectorXcd& c) const;
};

inline constexpr double kDefaultEnergyCutoff = 400.0;

/// Modes of H_ref = H(g_functions_static(a0, b0)) with eigenvalue <= energy_cutoff.
ReducedModel build_reduced_model(const HamiltonianOperators& ops, const SpectralBasis& basis,
                                 const DrivingLaw& driving, double energy_cutoff = kDefaultEnergyCutoff);

struct InitialStateReport {
  double basis_discarded = 0.0;  ///< 1 - |c|^2 over the full circular basis
  double model_discarded = 0.0;  ///< 1 - |s|^2 after the reduced-model projection
};

struct PreparedState {
  SpectralState state;            ///< renormalised, inside the reduced model
  Eigen::VectorXcd reduced;       ///< the same state in model coordinates
  InitialStateReport report;
};

/// Projects a static eigenstate, placed on the ellipse at t = 0 and carrying
/// the phase exp(-iS(0)), onto the model. TruncationError when the weight
/// outside the circular basis exceeds `max_discarded` or the weight outside
/// the reduced model exceeds `max_model_discarded`.
PreparedState prepare_initial_state(const EllipticEigenstate& eig, const DrivingLaw& driving,
                                    const ReducedModel& model, const CircularBasisGrid& grid,
                                    double max_discarded = 1e-6, double max_model_discarded = 1e-4);

struct PropagationConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double t_start = 0.0;
  double t_end = 0.0;       ///< may be below t_start (backward integration)
  double sample_dt = 0.0;   ///< > 0; samples at t_start + k sample_dt
  double norm_tol = 1e-6;
};

/// Samples of the reduced state (Schroedinger picture).
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  OdeStats stats;
  double max_norm_drift = 0.0;
};

/// Integrates in the interaction picture of H_ref (u = e^{i levels t} s) with
/// Dormand-Prince 5(4). Norm drift beyond norm_tol aborts with NumericalError.
Trajectory propagate(const Eigen::VectorXcd& initial, const DrivingLaw& driving, const ReducedModel& model,
                     const PropagationConfig& config);

/// Reduced propagators over one driving period at uniform phases.
struct PeriodMap {
  double period = 0.0;
  std::vector<Eigen::MatrixXcd> steps;  ///< U(k T / phases), k = 0..phases; steps.back() = U(T)
  OdeStats stats;
  double unitarity_defect = 0.0;        ///< ||U(T)^H U(T) - I||_F before re-orthonormalisation
};

/// Integrates the identity through one period. U(T) is replaced by the
/// unitary factor of its polar decomposition.
PeriodMap period_map(const DrivingLaw& driving, const ReducedModel& model, int phases, const OdeTolerances& tol);

/// s(nT + t_k) = U(t_k) U(T)^n s(0) at every phase of the map for n < periods,
/// plus the final sample at periods * T. NumericalError on norm drift.
Trajectory propagate_periodic(const Eigen::VectorXcd& initial, const PeriodMap& map, int periods,
                              double norm_tol = 1e-6);

/// Sample times t_start + k dt up to t_end (inclusive within 1e-9 dt).
std::vector<double> sample_times(double t_start, double t_end, double dt);

}  // namespace ebill
