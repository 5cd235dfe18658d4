#include "ebill/frequency_scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace ebill {

namespace {

SpectrumTracker make_tracker(const DrivingLaw& driving, const ScanConfig& config) {
  if (config.label < 1) throw DomainError("scan: state labels start at 1");
  SpectrumTracker tracker(driving, config.partner_energy);
  if (config.label > tracker.size()) {
    throw DomainError("scan: label " + std::to_string(config.label) + " lies above partner_energy");
  }
  return tracker;
}

}  // namespace

ScanContext::ScanContext(const CouplingTable& table, const DrivingLaw& driving, const ScanConfig& config)
    : config_(config),
      driving_(driving),
      ops_(assemble_operators(table)),
      tracker_(make_tracker(driving, config)),
      model_(build_reduced_model(
          ops_, make_basis(ops_.index, BasisSelection::sector(tracker_.equilibrium()[config.label - 1].symmetry)),
          driving, config.energy_cutoff)),
      grid_(ops_.index),
      energy_(ops_, model_) {
  if (config.horizon_periods < 1 || config.max_horizon_periods < config.horizon_periods) {
    throw DomainError("ScanContext: need 1 <= horizon_periods <= max_horizon_periods");
  }
  if (config.phases_per_period < 40) throw DomainError("ScanContext: need at least 40 phases per period");
  sector_labels_ = tracker_.labels_with(tracker_.equilibrium()[config.label - 1].symmetry);
  metadata_.label = config.label;
  metadata_.horizon_periods = config.horizon_periods;
  metadata_.N = table.N();
  metadata_.M = table.M();
  metadata_.rel_tol = config.tolerances.rel_tol;
  metadata_.abs_tol = config.tolerances.abs_tol;
  metadata_.energy_cutoff = config.energy_cutoff;
  metadata_.adiabatic_low = tracker_.energy_at(config.label, 0.25);
  metadata_.adiabatic_high = tracker_.energy_at(config.label, 0.75);
}

ScanRow ScanContext::run(double omega) const {
  const DrivingLaw d = driving_.with_omega(omega);
  const PreparedState prep = prepare_initial_state(tracker_.equilibrium()[config_.label - 1], d, model_, grid_);
  const PeriodMap map = period_map(d, model_, config_.phases_per_period, config_.tolerances);
  const PopulationProjector strobe(tracker_, sector_labels_, d, model_, grid_, 1);

  ScanRow row;
  row.omega = omega;
  int periods = config_.horizon_periods;
  for (;;) {
    const Trajectory traj = propagate_periodic(prep.reduced, map, periods);
    const ObservableSeries series = evaluate_observables(traj, d, energy_);

    ObservableSeries stroboscopic;
    stroboscopic.omega = omega;
    const auto phases = static_cast<std::size_t>(config_.phases_per_period);
    for (std::size_t k = 0; k < traj.times.size(); k += phases) {
      stroboscopic.times.push_back(traj.times[k]);
      const Eigen::VectorXd p = strobe.populations(traj.states[k], traj.times[k]);
      for (std::size_t i = 0; i < sector_labels_.size(); ++i) {
        stroboscopic.populations[sector_labels_[i]].push_back(p(static_cast<Eigen::Index>(i)));
      }
    }

    row.e_max = series.e_max;
    row.e_min = series.e_min;
    row.horizon_periods = periods;
    row.t_b = beating_period(stroboscopic, config_.label);
    row.partners.clear();
    std::vector<std::pair<double, int>> peaks;
    for (const auto& [label, p] : stroboscopic.populations) {
      if (label == config_.label) continue;
      const double top = *std::max_element(p.begin(), p.end());
      if (top >= config_.partner_threshold) peaks.emplace_back(top, label);
    }
    std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& pk : peaks) row.partners.push_back(pk.second);

    const bool slow = row.t_b && *row.t_b > config_.extend_beat_periods * d.period();
    if (!slow || 2 * periods > config_.max_horizon_periods) break;
    periods *= 2;
  }
  return row;
}

std::vector<ScanRow> scan_rows(const std::vector<double>& omegas, const RowFunction& row, int threads) {
  std::vector<double> grid = omegas;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<ScanRow> rows(grid.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = row(grid[i]);
      } catch (const std::exception& e) {
        rows[i] = ScanRow{};
        rows[i].e_max = rows[i].e_min = std::numeric_limits<double>::quiet_NaN();
        rows[i].error = e.what();
      }
      rows[i].omega = grid[i];
    }
  };
  int n = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = std::min<int>(n, static_cast<int>(std::max<std::size_t>(grid.size(), 1)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

ScanResult scan(const std::vector<double>& omegas, const ScanContext& context) {
  ScanResult result;
  result.metadata = context.metadata();
  result.rows = scan_rows(omegas, [&](double w) { return context.run(w); }, context.config().threads);
  return result;
}

ScanResult scan(const std::vector<double>& omegas, const CouplingTable& table, const DrivingLaw& driving,
                const ScanConfig& config) {
  const ScanContext context(table, driving, config);
  return scan(omegas, context);
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("uniform_grid: need step > 0 and hi >= lo");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-3));
  for (long k = 0; k <= n; ++k) out.push_back(std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9);
  return out;
}

std::vector<Resonance> detect_resonances(const ScanResult& result, Extremum which, double fraction) {
  std::vector<double> w, v;
  for (const ScanRow& r : result.rows) {
    if (!r.ok()) continue;
    w.push_back(r.omega);
    v.push_back(which == Extremum::Max ? r.e_max : -r.e_min);
  }
  const std::size_t n = v.size();
  if (n < 5) throw DomainError("detect_resonances: need at least 5 successful rows");
  double band = result.metadata.adiabatic_high - result.metadata.adiabatic_low;
  if (!(band > 0.0)) band = *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
  const double threshold = fraction * band;

  std::vector<Resonance> out;
  for (std::size_t i = 0; i < n; ++i) {
    // Plateaus count once; extrema on the grid edges are not resonances.
    if (i == 0 || v[i] <= v[i - 1]) continue;
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 == n || v[j + 1] >= v[i]) continue;

    double left_min = v[i];
    for (std::size_t l = i; l > 0 && v[l - 1] <= v[i];) left_min = std::min(left_min, v[--l]);
    double right_min = v[i];
    for (std::size_t r = j; r + 1 < n && v[r + 1] <= v[i];) right_min = std::min(right_min, v[++r]);
    const double base = std::max(left_min, right_min);
    const double prominence = v[i] - base;
    if (prominence <= threshold) continue;

    const double half = v[i] - 0.5 * prominence;
    std::size_t a = i;
    while (a > 0 && v[a - 1] > half) --a;
    double left_x = w[a];
    if (a > 0) left_x = w[a - 1] + (half - v[a - 1]) / (v[a] - v[a - 1]) * (w[a] - w[a - 1]);
    std::size_t b = j;
    while (b + 1 < n && v[b + 1] > half) ++b;
    double right_x = w[b];
    if (b + 1 < n) right_x = w[b] + (v[b] - half) / (v[b] - v[b + 1]) * (w[b + 1] - w[b]);
    out.push_back({w[i], right_x - left_x, prominence, left_x, right_x});
  }
  return out;
}

std::vector<double> refinement_grid(const ScanResult& result, const std::vector<Resonance>& resonances, double step,
                                    double half_width) {
  std::vector<double> out;
  auto present = [&](double w) {
    for (const ScanRow& r : result.rows)
      if (std::abs(r.omega - w) < 1e-3 * step) return true;
    for (double x : out)
      if (std::abs(x - w) < 1e-3 * step) return true;
    return false;
  };
  for (const Resonance& res : resonances) {
    const double lo = std::round((res.omega - half_width) / step) * step;
    for (double w : uniform_grid(lo, res.omega + half_width + 1e-9, step)) {
      if (w > 0.0 && !present(w)) out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScanResult merge(const ScanResult& a, const ScanResult& b) {
  ScanResult out;
  out.metadata = a.metadata;
  out.rows = a.rows;
  for (const ScanRow& r : b.rows) {
    const bool dup = std::any_of(out.rows.begin(), out.rows.end(),
                                 [&](const ScanRow& x) { return std::abs(x.omega - r.omega) < 1e-9; });
    if (!dup) out.rows.push_back(r);
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const ScanRow& x, const ScanRow& y) { return x.omega < y.omega; });
  return out;
}

std::vector<double> multiphoton_lines(const SpectrumTracker& tracker, int label, double lo, double hi,
                                      int max_order) {
  if (max_order < 1) throw DomainError("multiphoton_lines: max_order must be >= 1");
  const Symmetry sym = tracker.equilibrium().at(static_cast<std::size_t>(label - 1)).symmetry;
  std::vector<double> out;
  for (int other : tracker.labels_with(sym)) {
    if (other == label) continue;
    const double gap = mean_energy_difference(tracker, label, other);
    for (int n = 1; n <= max_order; ++n) {
      const double w = gap / n;
      if (w >= lo && w <= hi) out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScanResult scan_with_refinement(const std::vector<double>& coarse, const ScanFunction& run,
                                const RefinementConfig& refinement) {
  ScanResult result = run(coarse);
  std::vector<Resonance> targets = detect_resonances(result, Extremum::Max, refinement.fraction);
  const std::vector<Resonance> dips = detect_resonances(result, Extremum::Min, refinement.fraction);
  targets.insert(targets.end(), dips.begin(), dips.end());
  std::vector<double> fine = refinement_grid(result, targets, refinement.fine_step, refinement.half_width);

  std::vector<Resonance> lines;
  for (double w : refinement.lines) lines.push_back({w, 0.0, 0.0, w, w});
  ScanResult pending = result;
  for (double w : fine) {
    ScanRow placeholder;
    placeholder.omega = w;
    pending.rows.push_back(placeholder);
  }
  for (double w : refinement_grid(pending, lines, refinement.line_step, refinement.line_half_width)) {
    fine.push_back(w);
  }
  if (fine.empty()) return result;
  return merge(result, run(fine));
}

}  // namespace ebill
