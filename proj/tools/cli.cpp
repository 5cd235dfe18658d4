#include "cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ebill/csv.hpp"
#include "ebill/frequency_scan.hpp"
#include "ebill/rabi_model.hpp"
#include "run_config.hpp"

#ifndef EBILL_VERSION
#define EBILL_VERSION "0.0.0"
#endif

namespace ebill::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log(const std::string& msg) { std::cerr << "ebill: " << msg << '\n'; }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json versions() {
  return {{"ebill", EBILL_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION},
          {"table_format", kTableFormatVersion}};
}

/// Every user-facing file goes through here; checksums land in the sidecar.
class OutputWriter {
 public:
  explicit OutputWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void emit(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    checksums_[name] = "fnv1a64:" + hex64(content_checksum(text));
  }

  void sidecar(const std::string& name, json doc) {
    doc["outputs"] = checksums_;
    write_text(dir_ / name, doc.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> checksums_;
};

std::string plot_header(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                        const std::string& output) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set terminal pngcairo size 900,600\n"
    << "set output '" << output << "'\n"
    << "set title '" << title << "'\n"
    << "set xlabel '" << xlabel << "'\n"
    << "set ylabel '" << ylabel << "'\n"
    << "set key outside right\n"
    << "set grid\n";
  return s.str();
}

DrivingLaw driving_of(const RunConfig& c) { return {c.a0, c.b0, c.c, c.omega}; }

OdeTolerances tolerances_of(const RunConfig& c) {
  OdeTolerances tol;
  tol.rel_tol = c.rel_tol;
  tol.abs_tol = c.abs_tol;
  return tol;
}

std::string table_file_name(const RunConfig& c) {
  return "tables_N" + std::to_string(c.N) + "_M" + std::to_string(c.M) + "_q" + std::to_string(c.quad_order) +
         ".ebt";
}

CouplingTable obtain_table(const RunConfig& c) {
  if (!c.cache_dir) {
    log("building coupling tables N=" + std::to_string(c.N) + " M=" + std::to_string(c.M));
    return build_tables(c.N, c.M, c.quad_order);
  }
  const fs::path file = fs::path(*c.cache_dir) / table_file_name(c);
  if (fs::exists(file)) {
    log("loading coupling tables from " + file.string());
    return load_table(file, c.N, c.M);
  }
  log("building coupling tables into " + file.string());
  CouplingTable table = build_tables(c.N, c.M, c.quad_order);
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (ec) throw IoError("cannot create cache directory " + file.parent_path().string() + ": " + ec.message());
  save_table(table, file);
  return table;
}

json table_json(const CouplingTable& t) {
  return {{"N", t.N()}, {"M", t.M()}, {"quad_order", t.quad_order()}, {"checksum", "fnv1a64:" + hex64(t.checksum())}};
}

json base_sidecar(const std::string& command, const RunConfig& c) {
  return {{"command", command}, {"versions", versions()}, {"config", to_json(c)}};
}

std::vector<int> labels_below(const SpectrumTracker& tracker, int count) {
  std::vector<int> out;
  for (int l = 1; l <= std::min(count, tracker.size()); ++l) out.push_back(l);
  return out;
}

json resonances_json(const ScanResult& result) {
  json out = json::object();
  std::size_t ok = 0;
  for (const ScanRow& r : result.rows) ok += r.ok();
  if (ok < 5) return out;
  for (auto [which, key] : {std::pair{Extremum::Max, "e_max_peaks"}, std::pair{Extremum::Min, "e_min_dips"}}) {
    json list = json::array();
    for (const Resonance& r : detect_resonances(result, which)) {
      list.push_back({{"omega", r.omega}, {"prominence", r.prominence}, {"left", r.left}, {"right", r.right}});
    }
    out[key] = list;
  }
  return out;
}

json scan_metadata_json(const ScanMetadata& m) {
  return {{"model", m.model},
          {"label", m.label},
          {"horizon_periods", m.horizon_periods},
          {"N", m.N},
          {"M", m.M},
          {"rel_tol", m.rel_tol},
          {"abs_tol", m.abs_tol},
          {"energy_cutoff", m.energy_cutoff},
          {"adiabatic_low", m.adiabatic_low},
          {"adiabatic_high", m.adiabatic_high},
          {"coupling_strength", m.coupling_strength}};
}

std::string scan_plot(const std::string& csv, const std::string& title, const std::string& png,
                      const ScanMetadata& m) {
  std::ostringstream s;
  s << plot_header(title, "omega", "E", png) << "set arrow from graph 0, first " << m.adiabatic_high
    << " to graph 1, first " << m.adiabatic_high << " nohead dt 2\n"
    << "set arrow from graph 0, first " << m.adiabatic_low << " to graph 1, first " << m.adiabatic_low
    << " nohead dt 2\n"
    << "plot '" << csv << "' using 1:2 with linespoints pt 7 ps 0.3 title 'E_max', \\\n"
    << "     '" << csv << "' using 1:3 with linespoints pt 7 ps 0.3 title 'E_min'\n";
  return s.str();
}

int failed_rows(const ScanResult& result) {
  int n = 0;
  for (const ScanRow& r : result.rows) {
    if (!r.ok()) {
      ++n;
      log("omega " + csv_number(r.omega) + " failed: " + r.error);
    }
  }
  return n;
}

int run_spectrum(const RunConfig& c) {
  const DrivingLaw d = driving_of(c);
  const SpectrumTracker tracker(d, c.spectrum_e_max);
  OutputWriter out(c.output_dir);
  out.emit("spectrum.csv", spectrum_table(tracker.equilibrium()).str());

  json meta = base_sidecar("spectrum", c);
  meta["results"] = {{"states", tracker.size()}};

  if (c.emit_plot) {
    const std::vector<int> labels = labels_below(tracker, tracker.size());
    std::vector<std::string> header{"zeta"};
    for (int l : labels) header.push_back("E_" + std::to_string(l));
    CsvTable phases(header);
    const int n = c.samples_per_period;
    for (int k = 0; k <= n; ++k) {
      const double zeta = double(k) / n;
      std::vector<std::string> row{csv_number(zeta)};
      for (int l : labels) row.push_back(csv_number(tracker.energy_at(l, zeta)));
      phases.add_row(std::move(row));
    }
    out.emit("phase_energies.csv", phases.str());

    const Symmetry even{1, 1};
    std::vector<int> highlighted = tracker.labels_with(even);
    if (highlighted.size() > 5) highlighted.resize(5);
    std::ostringstream s;
    s << plot_header("Instantaneous spectrum E_i(zeta)", "zeta", "E_i", "fig1.png") << "plot ";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool bold = std::find(highlighted.begin(), highlighted.end(), labels[i]) != highlighted.end();
      s << (i ? ", \\\n     " : "") << "'phase_energies.csv' using 1:" << i + 2 << " with lines "
        << (bold ? "lw 3" : "lw 1 dt 2") << " title 'E_" << labels[i] << "'";
    }
    s << '\n';
    out.emit("fig1.gp", s.str());
  }
  out.sidecar("spectrum.json", meta);
  return kExitOk;
}

int run_tables(const RunConfig& c) {
  const fs::path dir = c.cache_dir ? fs::path(*c.cache_dir) : fs::path(c.output_dir);
  const fs::path file = dir / table_file_name(c);
  log("building coupling tables N=" + std::to_string(c.N) + " M=" + std::to_string(c.M));
  const CouplingTable table = build_tables(c.N, c.M, c.quad_order);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  save_table(table, file);
  const CouplingTable reloaded = load_table(file);
  if (!(reloaded == table)) throw IoError("tables: reloaded cache differs from the built table");

  OutputWriter out(c.output_dir);
  json meta = base_sidecar("tables", c);
  meta["results"] = {{"table", table_json(table)}, {"file", file.filename().string()}};
  out.sidecar("tables.json", meta);
  return kExitOk;
}

int run_propagate(const RunConfig& c) {
  const DrivingLaw d = driving_of(c);
  const CouplingTable table = obtain_table(c);
  const HamiltonianOperators ops = assemble_operators(table);
  const SpectrumTracker tracker(d, std::max(c.partner_energy, 1.0));
  if (c.state > tracker.size()) {
    throw DomainError("state " + std::to_string(c.state) + " lies above propagate.partner_energy");
  }
  const EllipticEigenstate& eig = tracker.equilibrium()[static_cast<std::size_t>(c.state - 1)];
  const ReducedModel model =
      build_reduced_model(ops, make_basis(ops.index, BasisSelection::sector(eig.symmetry)), d, c.energy_cutoff);
  const CircularBasisGrid grid(ops.index);
  const PreparedState prep = prepare_initial_state(eig, d, model, grid);

  Trajectory traj;
  double unitarity = 0.0;
  if (c.method == "periodic") {
    const PeriodMap map = period_map(d, model, c.samples_per_period, tolerances_of(c));
    unitarity = map.unitarity_defect;
    traj = propagate_periodic(prep.reduced, map, c.periods, c.norm_tol);
    traj.stats = map.stats;
  } else {
    PropagationConfig pc;
    pc.rel_tol = c.rel_tol;
    pc.abs_tol = c.abs_tol;
    pc.t_end = c.periods * d.period();
    pc.sample_dt = d.period() / c.samples_per_period;
    pc.norm_tol = c.norm_tol;
    traj = propagate(prep.reduced, d, model, pc);
  }

  const EnergyOperator energy(ops, model);
  const PopulationProjector projector(tracker, tracker.labels_with(eig.symmetry), d, model, grid,
                                      c.samples_per_period);
  const ObservableSeries series = evaluate_observables(traj, d, energy, &projector);

  OutputWriter out(c.output_dir);
  out.emit("energy.csv", energy_table(series, d.period()).str());
  out.emit("populations.csv", populations_table(series, d.period()).str());
  if (c.coefficients) {
    std::vector<std::string> header{"t/T"};
    for (int b = 0; b < ops.index.size(); ++b) {
      const std::string tag = std::to_string(ops.index.n_of(b)) + "_" + std::to_string(ops.index.m_of(b));
      header.push_back("re_" + tag);
      header.push_back("im_" + tag);
    }
    CsvTable coeffs(header);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const Eigen::VectorXcd full = model.to_full(traj.states[k]);
      std::vector<std::string> row{csv_number(traj.times[k] / d.period())};
      for (Eigen::Index b = 0; b < full.size(); ++b) {
        row.push_back(csv_number(full(b).real()));
        row.push_back(csv_number(full(b).imag()));
      }
      coeffs.add_row(std::move(row));
    }
    out.emit("coefficients.csv", coeffs.str());
  }

  const std::optional<double> t_b = beating_period(series, c.state);
  json meta = base_sidecar("propagate", c);
  meta["table"] = table_json(table);
  meta["results"] = {{"e_max", series.e_max},
                     {"e_min", series.e_min},
                     {"period", d.period()},
                     {"beating_period", t_b ? json(*t_b) : json(nullptr)},
                     {"model_dim", model.dim()},
                     {"basis_discarded", prep.report.basis_discarded},
                     {"model_discarded", prep.report.model_discarded},
                     {"max_norm_drift", traj.max_norm_drift},
                     {"unitarity_defect", unitarity},
                     {"ode_accepted", traj.stats.accepted},
                     {"ode_rejected", traj.stats.rejected},
                     {"labels", projector.labels()}};

  if (c.emit_plot) {
    std::ostringstream e;
    e << plot_header("E(t), omega = " + csv_number(c.omega) + ", state " + std::to_string(c.state), "t/T", "E",
                     "energy.png")
      << "plot 'energy.csv' using 1:2 with lines title 'E(t)'\n";
    out.emit("energy.gp", e.str());
    std::ostringstream p;
    p << plot_header("Populations p_i(t), omega = " + csv_number(c.omega), "t/T", "p_i", "populations.png")
      << "set yrange [0:1.05]\n"
      << "plot for [i=2:" << projector.labels().size() + 1
      << "] 'populations.csv' using 1:i with lines title columnheader(i)\n";
    out.emit("populations.gp", p.str());
  }
  out.sidecar("propagate.json", meta);
  return kExitOk;
}

ScanConfig scan_config_of(const RunConfig& c) {
  ScanConfig sc;
  sc.label = c.state;
  sc.horizon_periods = c.periods;
  sc.max_horizon_periods = std::max(4 * c.periods, c.periods);
  sc.phases_per_period = c.samples_per_period;
  sc.tolerances = tolerances_of(c);
  sc.energy_cutoff = c.energy_cutoff;
  sc.partner_energy = c.partner_energy;
  sc.threads = c.threads;
  return sc;
}

int run_scan(const RunConfig& c) {
  const DrivingLaw d = driving_of(c);
  const CouplingTable table = obtain_table(c);
  const ScanContext context(table, d, scan_config_of(c));
  const std::vector<double> coarse = uniform_grid(c.omega_grid.lo, c.omega_grid.hi, c.omega_grid.step);
  log("scanning " + std::to_string(coarse.size()) + " frequencies");
  const ScanFunction runner = [&](const std::vector<double>& w) { return scan(w, context); };
  ScanResult result;
  if (c.refine) {
    RefinementConfig rc;
    rc.lines = multiphoton_lines(context.tracker(), c.state, c.omega_grid.lo, c.omega_grid.hi);
    result = scan_with_refinement(coarse, runner, rc);
  } else {
    result = runner(coarse);
  }

  OutputWriter out(c.output_dir);
  out.emit("scan.csv", scan_table(result).str());
  if (c.emit_plot) out.emit("fig9.gp", scan_plot("scan.csv", "Extremal energies vs omega", "fig9.png", result.metadata));
  json meta = base_sidecar("scan", c);
  meta["model"] = result.metadata.model;
  meta["table"] = table_json(table);
  meta["results"] = {{"metadata", scan_metadata_json(result.metadata)},
                     {"rows", result.rows.size()},
                     {"resonances", resonances_json(result)}};
  out.sidecar("scan.json", meta);
  return failed_rows(result) ? kExitNumerical : kExitOk;
}

int run_rabi(const RunConfig& c) {
  const DrivingLaw d = driving_of(c);
  const SpectrumTracker tracker(d, c.partner_energy);
  LevelSet levels = fit_energy_shifts(tracker, c.rabi_levels);
  for (const std::string& w : levels.warnings) log("warning: " + w);
  RabiConfig rc;
  rc.horizon_periods = c.periods;
  rc.phases_per_period = c.samples_per_period;
  rc.tolerances = tolerances_of(c);
  rc.threads = c.threads;

  json calibration = nullptr;
  if (c.rabi_coupling) {
    levels.coupling_strength = *c.rabi_coupling;
  } else {
    const CouplingTable table = obtain_table(c);
    const ScanContext context(table, d, scan_config_of(c));
    const ScanRow full = context.run(c.calibration_omega);
    if (!full.t_b) throw NumericalError("rabi: no beating period in the full model at the calibration frequency");
    const Calibration cal = calibrate_coupling(levels, c.state, c.calibration_omega, *full.t_b, rc);
    levels.coupling_strength = cal.coupling_strength;
    calibration = {{"omega", c.calibration_omega},
                   {"target_t_b", cal.target_t_b},
                   {"model_t_b", cal.model_t_b},
                   {"table", table_json(table)}};
    log("calibrated coupling a = " + csv_number(cal.coupling_strength));
  }

  const ScanResult result =
      rabi_scan(levels, c.state, uniform_grid(c.omega_grid.lo, c.omega_grid.hi, c.rabi_step), rc);

  OutputWriter out(c.output_dir);
  out.emit("rabi_scan.csv", scan_table(result).str());
  if (c.emit_plot) {
    out.emit("fig10.gp", scan_plot("rabi_scan.csv", "Few-level model: extremal energies vs omega", "fig10.png",
                                   result.metadata));
  }
  json fits = json::array();
  for (int i = 0; i < levels.size(); ++i) {
    const ShiftFit& f = levels.fits[static_cast<std::size_t>(i)];
    fits.push_back({{"label", levels.labels[static_cast<std::size_t>(i)]},
                    {"offset", f.offset},
                    {"amplitude", f.amplitude},
                    {"phase", f.phase},
                    {"residual", f.residual}});
  }
  json meta = base_sidecar("rabi", c);
  meta["model"] = "rabi";
  meta["results"] = {{"metadata", scan_metadata_json(result.metadata)},
                     {"coupling_strength", levels.coupling_strength},
                     {"calibration", calibration},
                     {"fits", fits},
                     {"warnings", levels.warnings},
                     {"rows", result.rows.size()},
                     {"resonances", resonances_json(result)}};
  out.sidecar("rabi.json", meta);
  return failed_rows(result) ? kExitNumerical : kExitOk;
}

json read_config_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read config file " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + file + ": " + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Driven elliptical billiard: spectra, propagation, resonance scans and a few-level model", "ebill"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", EBILL_VERSION);
  std::map<std::string, CLI::App*> commands;
  commands["spectrum"] = app.add_subcommand("spectrum", "Equilibrium spectrum table (label, E, l, r, parity, pi_y, pi_x)");
  commands["tables"] = app.add_subcommand("tables", "Build and store the coupling-table cache");
  commands["propagate"] = app.add_subcommand("propagate", "Propagate one initial state: energy.csv, populations.csv");
  commands["scan"] = app.add_subcommand("scan", "Extremal energies over a frequency grid: scan.csv");
  commands["rabi"] = app.add_subcommand("rabi", "Few-level model scan: rabi_scan.csv");

  std::string config_file;
  bool print_config = false;
  std::optional<double> a0, b0, amp, omega, w_lo, w_hi, w_step, e_cut, rel, abs_tol, norm, e_max, partner, coupling,
      cal_omega, rabi_step;
  std::optional<int> state, n_radial, m_angular, quad, periods, samples, threads;
  std::optional<std::string> method, output_dir, cache_dir;
  std::optional<bool> refine;
  std::vector<int> levels;
  bool emit_plot = false, coefficients = false;

  app.add_option("--config", config_file, "JSON configuration file (flags override it)");
  app.add_flag("--print-config", print_config, "Print the resolved configuration as JSON and exit");
  app.add_option("--a0", a0, "Equilibrium semi-major axis");
  app.add_option("--b0", b0, "Equilibrium semi-minor axis");
  app.add_option("--amplitude,-c", amp, "Driving amplitude c");
  app.add_option("--omega,-w", omega, "Driving frequency");
  app.add_option("--omega-min", w_lo, "Scan grid start");
  app.add_option("--omega-max", w_hi, "Scan grid end");
  app.add_option("--omega-step", w_step, "Scan grid step");
  app.add_option("--state,-s", state, "Initial state label");
  app.add_option("--radial", n_radial, "Radial basis size N");
  app.add_option("--angular", m_angular, "Angular basis size M (m in [-M, M])");
  app.add_option("--quad-order", quad, "Gauss-Legendre panels for the table integrals");
  app.add_option("--energy-cutoff", e_cut, "Reduced-model energy cutoff");
  app.add_option("--rel-tol", rel, "Integrator relative tolerance");
  app.add_option("--abs-tol", abs_tol, "Integrator absolute tolerance");
  app.add_option("--norm-tol", norm, "Maximal norm drift");
  app.add_option("--periods", periods, "Propagation horizon in driving periods");
  app.add_option("--samples-per-period", samples, "Samples per driving period");
  app.add_option("--e-max", e_max, "Spectrum energy bound");
  app.add_option("--method", method, "Propagation method: periodic or direct");
  app.add_option("--partner-energy", partner, "Track equilibrium states up to this energy");
  app.add_flag("--coefficients", coefficients, "Also write coefficients.csv (propagate)");
  app.add_option("--refine", refine, "Refine resonances after the coarse scan (true/false)");
  app.add_option("--levels", levels, "Few-level model labels");
  app.add_option("--coupling", coupling, "Few-level coupling strength (skips calibration)");
  app.add_option("--calibration-omega", cal_omega, "Frequency of the coupling calibration");
  app.add_option("--rabi-step", rabi_step, "Few-level scan grid step");
  app.add_option("--output-dir,-o", output_dir, "Output directory");
  app.add_option("--cache-dir", cache_dir, std::string("Coupling-table cache directory (default $") + kCacheEnv + ")");
  app.add_option("--threads,-j", threads, "Worker threads (0: hardware concurrency)");
  app.add_flag("--emit-plot", emit_plot, "Write gnuplot scripts next to the data");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig c;
    if (const char* env = std::getenv(kCacheEnv); env && *env) c.cache_dir = env;
    if (!config_file.empty()) apply_json(c, read_config_file(config_file));
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(c.a0, a0);
    set(c.b0, b0);
    set(c.c, amp);
    set(c.omega, omega);
    set(c.omega_grid.lo, w_lo);
    set(c.omega_grid.hi, w_hi);
    set(c.omega_grid.step, w_step);
    set(c.state, state);
    set(c.N, n_radial);
    set(c.M, m_angular);
    set(c.quad_order, quad);
    set(c.energy_cutoff, e_cut);
    set(c.rel_tol, rel);
    set(c.abs_tol, abs_tol);
    set(c.norm_tol, norm);
    set(c.periods, periods);
    set(c.samples_per_period, samples);
    set(c.spectrum_e_max, e_max);
    set(c.method, method);
    set(c.partner_energy, partner);
    set(c.refine, refine);
    if (coupling) c.rabi_coupling = coupling;
    set(c.calibration_omega, cal_omega);
    set(c.rabi_step, rabi_step);
    set(c.output_dir, output_dir);
    if (cache_dir) c.cache_dir = cache_dir;
    set(c.threads, threads);
    if (!levels.empty()) c.rabi_levels = levels;
    if (emit_plot) c.emit_plot = true;
    if (coefficients) c.coefficients = true;
    validate(c);

    if (print_config) {
      std::cout << to_json(c).dump(2) << '\n';
      return kExitOk;
    }
    if (commands["spectrum"]->parsed()) return run_spectrum(c);
    if (commands["tables"]->parsed()) return run_tables(c);
    if (commands["propagate"]->parsed()) return run_propagate(c);
    if (commands["scan"]->parsed()) return run_scan(c);
    return run_rabi(c);
  } catch (const ConfigError& e) {
    log("configuration error: " + std::string(e.what()));
    return kExitConfig;
  } catch (const DomainError& e) {
    log("invalid input: " + std::string(e.what()));
    return kExitConfig;
  } catch (const NumericalError& e) {
    log("numerical failure: " + std::string(e.what()));
    return kExitNumerical;
  } catch (const IoError& e) {
    log("I/O error: " + std::string(e.what()));
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    log("I/O error: " + std::string(e.what()));
    return kExitIo;
  }
}

}  // namespace ebill::cli
