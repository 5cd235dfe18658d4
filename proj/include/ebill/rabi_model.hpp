#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ebill/frequency_scan.hpp"

namespace ebill {

/// E_i(zeta) ~ offset + amplitude sin(2 pi zeta + phase); offset is the phase average.
struct ShiftFit {
  double offset = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double residual = 0.0;  ///< rms misfit relative to the amplitude
};

/// Levels of the few-level model: mean energies, sinusoidal shifts and a
/// uniform coupling `coupling_strength` * sin(w t) between every pair.
struct LevelSet {
  std::vector<int> labels;
  std::vector<ShiftFit> fits;
  Symmetry symmetry;
  double coupling_strength = 0.0;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(labels.size()); }
  int index_of(int label) const;
  double mean_energy(int i) const { return fits[static_cast<std::size_t>(i)].offset; }
  /// Delta E_i(t) for driving frequency omega (zeta = omega t / 2 pi).
  double shift(int i, double t, double omega) const {
    const ShiftFit& f = fits[static_cast<std::size_t>(i)];
    return f.amplitude * std::sin(omega * t + f.phase);
  }
};

inline const std::vector<int> kDefaultRabiLabels{1, 4, 7, 10, 13, 18};

/// Least-squares sine fits of E_i(zeta) on `phases` uniform phases. The
/// offset is the exact phase average. Fits whose residual exceeds
/// `residual_limit` are reported in `warnings`. DomainError when the labels
/// do not share one symmetry sector.
LevelSet fit_energy_shifts(const SpectrumTracker& tracker, const std::vector<int>& labels, int phases = 64,
                           double residual_limit = 0.05);

/// c_i' = -i [ sum_{j != i} c_j a sin(w t) e^{i(E_i - E_j) t} + c_i Delta E_i(t) ].
Eigen::VectorXcd rabi_rhs(double t, const Eigen::VectorXcd& c, const LevelSet& levels, double omega);

/// The same dynamics for b_i = e^{-i E_i t} c_i:
/// H = diag(E_i + Delta E_i(t)) + a sin(w t) (ones - identity), periodic in t.
Eigen::MatrixXd rabi_hamiltonian(double t, const LevelSet& levels, double omega);

struct RabiConfig {
  int horizon_periods = 200;
  int phases_per_period = 64;
  OdeTolerances tolerances;
  int threads = 0;
};

/// Model energy sum_i |c_i|^2 (E_i + Delta E_i(t)) and populations |c_i|
/// sampled at `phases_per_period` points per period from the given level.
ObservableSeries rabi_evolve(const LevelSet& levels, int label, double omega, const RabiConfig& config);

ScanRow rabi_row(const LevelSet& levels, int label, double omega, const RabiConfig& config);

/// Frequency scan of the model; metadata.model = "rabi".
ScanResult rabi_scan(const LevelSet& levels, int label, const std::vector<double>& omegas, const RabiConfig& config);

struct Calibration {
  double coupling_strength = 0.0;
  double target_t_b = 0.0;
  double model_t_b = 0.0;
};

/// Coupling strength in [lo, hi] whose beating period at omega matches
/// target_t_b: log-spaced search for a sign change of T_b(a) - target,
/// then bisection; the closest grid value when no crossing exists.
Calibration calibrate_coupling(LevelSet levels, int label, double omega, double target_t_b, const RabiConfig& config,
                               double lo = 1e-2, double hi = 20.0);

}  // namespace ebill
