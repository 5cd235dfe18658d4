#include "ebill/rabi_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ebill {

using cd = std::complex<double>;

int LevelSet::index_of(int label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DomainError("LevelSet: label " + std::to_string(label) + " not in the model");
  return static_cast<int>(it - labels.begin());
}

LevelSet fit_energy_shifts(const SpectrumTracker& tracker, const std::vector<int>& labels, int phases,
                           double residual_limit) {
  if (labels.size() < 2) throw DomainError("fit_energy_shifts: need at least two levels");
  if (phases < 8) throw DomainError("fit_energy_shifts: need at least 8 phases");
  LevelSet set;
  set.labels = labels;
  for (int label : labels) {
    if (label < 1 || label > tracker.size()) {
      throw DomainError("fit_energy_shifts: label " + std::to_string(label) + " is not tracked");
    }
  }
  set.symmetry = tracker.equilibrium()[static_cast<std::size_t>(labels.front() - 1)].symmetry;
  for (int label : labels) {
    if (!(tracker.equilibrium()[static_cast<std::size_t>(label - 1)].symmetry == set.symmetry)) {
      throw DomainError("fit_energy_shifts: levels must share one symmetry sector");
    }
  }

  const double two_pi = 2.0 * std::numbers::pi;
  for (int label : labels) {
    std::vector<double> e(static_cast<std::size_t>(phases));
    for (int k = 0; k < phases; ++k) e[static_cast<std::size_t>(k)] = tracker.energy_at(label, double(k) / phases);
    ShiftFit fit;
    for (double v : e) fit.offset += v;
    fit.offset /= phases;
    double s = 0.0, c = 0.0;
    for (int k = 0; k < phases; ++k) {
      const double x = two_pi * k / phases;
      s += (e[static_cast<std::size_t>(k)] - fit.offset) * std::sin(x);
      c += (e[static_cast<std::size_t>(k)] - fit.offset) * std::cos(x);
    }
    s *= 2.0 / phases;
    c *= 2.0 / phases;
    fit.amplitude = std::hypot(s, c);
    fit.phase = std::atan2(c, s);
    double sq = 0.0;
    for (int k = 0; k < phases; ++k) {
      const double model = fit.offset + fit.amplitude * std::sin(two_pi * k / phases + fit.phase);
      sq += std::pow(e[static_cast<std::size_t>(k)] - model, 2);
    }
    fit.residual = fit.amplitude > 0.0 ? std::sqrt(sq / phases) / fit.amplitude : 0.0;
    if (fit.residual > residual_limit) {
      set.warnings.push_back("level " + std::to_string(label) + ": sine-fit residual " +
                             std::to_string(fit.residual) + " of the amplitude");
    }
    set.fits.push_back(fit);
  }
  return set;
}

Eigen::VectorXcd rabi_rhs(double t, const Eigen::VectorXcd& c, const LevelSet& levels, double omega) {
  const int n = levels.size();
  if (c.size() != n) throw DomainError("rabi_rhs: state size differs from the level set");
  const double drive = levels.coupling_strength * std::sin(omega * t);
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    cd sum = c(i) * levels.shift(i, t, omega);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum += c(j) * drive * std::polar(1.0, (levels.mean_energy(i) - levels.mean_energy(j)) * t);
    }
    out(i) = cd(0.0, -1.0) * sum;
  }
  return out;
}

Eigen::MatrixXd rabi_hamiltonian(double t, const LevelSet& levels, double omega) {
  const int n = levels.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Constant(n, n, levels.coupling_strength * std::sin(omega * t));
  for (int i = 0; i < n; ++i) h(i, i) = levels.mean_energy(i) + levels.shift(i, t, omega);
  return h;
}

ObservableSeries rabi_evolve(const LevelSet& levels, int label, double omega, const RabiConfig& config) {
  if (!(omega > 0.0)) throw DomainError("rabi_evolve: omega must be positive");
  if (config.horizon_periods < 1 || config.phases_per_period < 1) {
    throw DomainError("rabi_evolve: need a positive horizon and sampling");
  }
  const int n = levels.size();
  const int start = levels.index_of(label);
  const double period = 2.0 * std::numbers::pi / omega;
  const int phases = config.phases_per_period;

  std::vector<double> times(static_cast<std::size_t>(phases) + 1);
  for (int k = 0; k <= phases; ++k) times[static_cast<std::size_t>(k)] = period * k / phases;
  std::vector<Eigen::MatrixXcd> steps;
  auto f = [&](double t, const Eigen::MatrixXcd& u) -> Eigen::MatrixXcd {
    return cd(0.0, -1.0) * (rabi_hamiltonian(t, levels, omega) * u);
  };
  integrate_dp45<Eigen::MatrixXcd>(f, 0.0, Eigen::MatrixXcd::Identity(n, n), times, config.tolerances,
                                   [&](double, const Eigen::MatrixXcd& u) { steps.push_back(u); });
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(steps.back(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  steps.back() = svd.matrixU() * svd.matrixV().adjoint();

  ObservableSeries series;
  series.omega = omega;
  for (int label_i : levels.labels) series.populations[label_i] = {};
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b(start) = 1.0;
  auto record = [&](double t, const Eigen::VectorXcd& s) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = std::norm(s(i));
      e += p * (levels.mean_energy(i) + levels.shift(i, t, omega));
      series.populations[levels.labels[static_cast<std::size_t>(i)]].push_back(std::sqrt(p));
    }
    series.times.push_back(t);
    series.energy.push_back(e);
  };
  for (int p = 0; p < config.horizon_periods; ++p) {
    for (int k = 0; k < phases; ++k) record(period * (p + double(k) / phases), steps[static_cast<std::size_t>(k)] * b);
    b = steps.back() * b;
  }
  record(period * config.horizon_periods, b);
  if (std::abs(b.norm() - 1.0) > 1e-6) throw NumericalError("rabi_evolve: norm drift beyond 1e-6");
  const auto [lo, hi] = std::minmax_element(series.energy.begin(), series.energy.end());
  series.e_min = *lo;
  series.e_max = *hi;
  return series;
}

ScanRow rabi_row(const LevelSet& levels, int label, double omega, const RabiConfig& config) {
  const ObservableSeries series = rabi_evolve(levels, label, omega, config);
  ScanRow row;
  row.omega = omega;
  row.e_max = series.e_max;
  row.e_min = series.e_min;
  row.horizon_periods = config.horizon_periods;
  row.t_b = beating_period(series, label);
  std::vector<std::pair<double, int>> peaks;
  for (const auto& [l, p] : series.populations) {
    if (l == label) continue;
    const double top = *std::max_element(p.begin(), p.end());
    if (top >= 0.1) peaks.emplace_back(top, l);
  }
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& pk : peaks) row.partners.push_back(pk.second);
  return row;
}

ScanResult rabi_scan(const LevelSet& levels, int label, const std::vector<double>& omegas, const RabiConfig& config) {
  levels.index_of(label);
  ScanResult result;
  result.metadata.model = "rabi";
  result.metadata.label = label;
  result.metadata.horizon_periods = config.horizon_periods;
  result.metadata.rel_tol = config.tolerances.rel_tol;
  result.metadata.abs_tol = config.tolerances.abs_tol;
  result.metadata.coupling_strength = levels.coupling_strength;
  const ShiftFit& fit = levels.fits[static_cast<std::size_t>(levels.index_of(label))];
  result.metadata.adiabatic_low = fit.offset + fit.amplitude * std::sin(0.5 * std::numbers::pi + fit.phase);
  result.metadata.adiabatic_high = fit.offset + fit.amplitude * std::sin(1.5 * std::numbers::pi + fit.phase);
  if (result.metadata.adiabatic_low > result.metadata.adiabatic_high) {
    std::swap(result.metadata.adiabatic_low, result.metadata.adiabatic_high);
  }
  result.rows = scan_rows(omegas, [&](double w) { return rabi_row(levels, label, w, config); }, config.threads);
  return result;
}

Calibration calibrate_coupling(LevelSet levels, int label, double omega, double target_t_b, const RabiConfig& config,
                               double lo, double hi) {
  if (!(target_t_b > 0.0) || !(lo > 0.0) || !(hi > lo)) throw DomainError("calibrate_coupling: invalid bracket");
  auto beat = [&](double a) {
    levels.coupling_strength = a;
    const auto tb = beating_period(rabi_evolve(levels, label, omega, config), label);
    return tb ? *tb : std::numeric_limits<double>::infinity();
  };
  constexpr int kGrid = 41;
  std::vector<double> a(kGrid), tb(kGrid);
  for (int k = 0; k < kGrid; ++k) {
    a[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, double(k) / (kGrid - 1));
    tb[static_cast<std::size_t>(k)] = beat(a[static_cast<std::size_t>(k)]);
  }
  Calibration out;
  out.target_t_b = target_t_b;
  for (int k = 0; k + 1 < kGrid; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double f0 = tb[i] - target_t_b, f1 = tb[i + 1] - target_t_b;
    if (!std::isfinite(f0) || !std::isfinite(f1) || f0 * f1 > 0.0) continue;
    double x0 = a[i], x1 = a[i + 1], g0 = f0;
    for (int it = 0; it < 40 && x1 / x0 > 1.0 + 1e-6; ++it) {
      const double xm = std::sqrt(x0 * x1);
      const double gm = beat(xm) - target_t_b;
      if (g0 * gm <= 0.0) {
        x1 = xm;
      } else {
        x0 = xm;
        g0 = gm;
      }
    }
    out.coupling_strength = std::sqrt(x0 * x1);
    out.model_t_b = beat(out.coupling_strength);
    return out;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    if (std::abs(tb[k] - target_t_b) < std::abs(tb[best] - target_t_b)) best = k;
  }
  out.coupling_strength = a[best];
  out.model_t_b = tb[best];
  return out;
}

}  // namespace ebill
