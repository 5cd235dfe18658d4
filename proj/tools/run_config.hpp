#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ebill::cli {

/// Schema violation in a configuration file or flag value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OmegaGrid {
  double lo = 1.0;
  double hi = 17.0;
  double step = 0.05;
};

struct RunConfig {
  // geometry
  double a0 = 1.0;
  double b0 = std::sqrt(0.51);
  // driving
  double c = 0.1;
  double omega = 5.0;
  OmegaGrid omega_grid;
  // initial state
  int state = 4;
  // basis
  int N = 20;
  int M = 20;
  int quad_order = 64;
  double energy_cutoff = 400.0;
  // tolerances
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double norm_tol = 1e-6;
  // horizon
  int periods = 200;
  int samples_per_period = 64;
  // spectrum
  double spectrum_e_max = 50.0;
  // propagate
  std::string method = "periodic";
  double partner_energy = 70.0;
  bool coefficients = false;
  // scan
  bool refine = true;
  // rabi
  std::vector<int> rabi_levels{1, 4, 7, 10, 13, 18};
  std::optional<double> rabi_coupling;
  double calibration_omega = 5.0;
  double rabi_step = 0.0025;
  // run
  std::string output_dir = ".";
  std::optional<std::string> cache_dir;
  int threads = 0;  ///< 0: hardware concurrency
  bool emit_plot = false;
};

/// Overlays a JSON document on `config`. Unknown keys, wrong types and
/// out-of-range values throw ConfigError.
void apply_json(RunConfig& config, const nlohmann::json& doc);

/// Full nested representation; apply_json(RunConfig{}, to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

/// Semantic checks across fields (a0 > b0 > 0, 0 <= c < b0, ...).
void validate(const RunConfig& config);

}  // namespace ebill::cli
