#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ebill/observables.hpp"

namespace ebill {

struct ScanConfig {
  int label = 4;
  int horizon_periods = 200;
  int max_horizon_periods = 800;
  double extend_beat_periods = 60.0;  ///< horizon doubles while T_b exceeds this many periods
  int phases_per_period = 64;
  OdeTolerances tolerances;
  double energy_cutoff = kDefaultEnergyCutoff;
  double partner_energy = 70.0;       ///< equilibrium states up to this energy are tracked
  double partner_threshold = 0.1;     ///< minimal max_n p_i(nT) for a dominant partner
  int threads = 0;                    ///< 0: hardware concurrency
};

struct ScanRow {
  double omega = 0.0;
  double e_max = 0.0;
  double e_min = 0.0;
  std::vector<int> partners;    ///< other labels ordered by their largest stroboscopic population
  std::optional<double> t_b;
  int horizon_periods = 0;
  std::string error;            ///< empty for a successful row

  bool ok() const { return error.empty(); }
};

struct ScanMetadata {
  std::string model = "full";
  int label = 0;
  int horizon_periods = 0;
  int N = 0;
  int M = 0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  double energy_cutoff = 0.0;
  double adiabatic_low = 0.0;   ///< E_label(zeta = 1/4)
  double adiabatic_high = 0.0;  ///< E_label(zeta = 3/4)
  double coupling_strength = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;  ///< strictly increasing omega
  ScanMetadata metadata;
};

/// Shared, immutable state of a scan: operators, reduced model and the
/// equilibrium labelling, built once for a driving template.
class ScanContext {
 public:
  ScanContext(const CouplingTable& table, const DrivingLaw& driving, const ScanConfig& config);

  /// One propagation at frequency omega; throws on failure.
  ScanRow run(double omega) const;

  const ScanConfig& config() const { return config_; }
  const ScanMetadata& metadata() const { return metadata_; }
  const ReducedModel& model() const { return model_; }
  const SpectrumTracker& tracker() const { return tracker_; }

 private:
  ScanConfig config_;
  DrivingLaw driving_;
  HamiltonianOperators ops_;
  SpectrumTracker tracker_;
  ReducedModel model_;
  CircularBasisGrid grid_;
  EnergyOperator energy_;
  std::vector<int> sector_labels_;
  ScanMetadata metadata_;
};

/// Runs every omega (sorted and deduplicated); row failures are recorded,
/// not thrown. Rows are computed on `threads` workers and returned by omega.
ScanResult scan(const std::vector<double>& omegas, const ScanContext& context);
ScanResult scan(const std::vector<double>& omegas, const CouplingTable& table, const DrivingLaw& driving,
                const ScanConfig& config);

/// Row producer for one frequency (throws on failure).
using RowFunction = std::function<ScanRow(double omega)>;

/// Evaluates `row` for every omega (sorted, deduplicated) on `threads`
/// workers (0: hardware concurrency); failures become rows with an error.
std::vector<ScanRow> scan_rows(const std::vector<double>& omegas, const RowFunction& row, int threads);

/// lo, lo + step, ... up to hi inclusive (within step/1000).
std::vector<double> uniform_grid(double lo, double hi, double step);

enum class Extremum { Max, Min };

struct Resonance {
  double omega;       ///< grid point of the extremum
  double width;       ///< full width at half prominence (linear interpolation)
  double prominence;  ///< in energy units
  double left;        ///< half-prominence crossings
  double right;
};

/// Local maxima of E_max (Max) or minima of E_min (Min) whose topographic
/// prominence exceeds `fraction` times the adiabatic band height
/// E(3/4) - E(1/4) (or the data range if the band is unknown). Failed rows
/// are skipped. Needs at least 5 rows.
std::vector<Resonance> detect_resonances(const ScanResult& result, Extremum which, double fraction = 0.05);

/// Points at `step` within +-half_width of each resonance that the result
/// does not hold yet.
std::vector<double> refinement_grid(const ScanResult& result, const std::vector<Resonance>& resonances, double step,
                                    double half_width);

/// Union of two scans of the same setup, ordered by omega.
ScanResult merge(const ScanResult& a, const ScanResult& b);

/// Positions E_{label<->j} / n of n-photon lines (n <= max_order) for every
/// other tracked label j of the same symmetry sector, inside [lo, hi], sorted.
std::vector<double> multiphoton_lines(const SpectrumTracker& tracker, int label, double lo, double hi,
                                      int max_order = 4);

struct RefinementConfig {
  double fine_step = 0.01;        ///< around detected extrema
  double half_width = 0.05;
  double fraction = 0.05;         ///< prominence threshold of the detection
  std::vector<double> lines;      ///< narrow lines refined at line_step (e.g. multiphoton_lines)
  double line_step = 0.0025;
  double line_half_width = 0.02;
};

/// Coarse scan followed by one refinement pass around the E_max peaks and
/// E_min dips of the coarse result and around the given lines.
using ScanFunction = std::function<ScanResult(const std::vector<double>& omegas)>;
ScanResult scan_with_refinement(const std::vector<double>& coarse, const ScanFunction& run,
                                const RefinementConfig& refinement = {});

}  // namespace ebill
