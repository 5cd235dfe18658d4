#include "run_config.hpp"

#include <algorithm>
#include <initializer_list>
#include <string_view>

namespace ebill::cli {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

std::string path(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

void read(const json& j, const std::string& where, const char* key, double& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number()) throw ConfigError(path(where, key) + ": expected a number");
  out = j[key].get<double>();
  if (!std::isfinite(out)) throw ConfigError(path(where, key) + ": must be finite");
}

void read(const json& j, const std::string& where, const char* key, int& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_integer()) throw ConfigError(path(where, key) + ": expected an integer");
  out = j[key].get<int>();
}

void read(const json& j, const std::string& where, const char* key, bool& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_boolean()) throw ConfigError(path(where, key) + ": expected a boolean");
  out = j[key].get<bool>();
}

void read(const json& j, const std::string& where, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_string()) throw ConfigError(path(where, key) + ": expected a string");
  out = j[key].get<std::string>();
}

void read(const json& j, const std::string& where, const char* key, std::optional<double>& out) {
  if (!j.contains(key)) return;
  if (j[key].is_null()) {
    out.reset();
    return;
  }
  double v = 0.0;
  read(j, where, key, v);
  out = v;
}

void read(const json& j, const std::string& where, const char* key, std::optional<std::string>& out) {
  if (!j.contains(key)) return;
  if (j[key].is_null()) {
    out.reset();
    return;
  }
  std::string v;
  read(j, where, key, v);
  out = v;
}

void read(const json& j, const std::string& where, const char* key, std::vector<int>& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_array()) throw ConfigError(path(where, key) + ": expected an array of integers");
  std::vector<int> v;
  for (const json& x : j[key]) {
    if (!x.is_number_integer()) throw ConfigError(path(where, key) + ": expected an array of integers");
    v.push_back(x.get<int>());
  }
  out = std::move(v);
}

const json* section(const json& doc, const char* key, std::initializer_list<std::string_view> allowed) {
  if (!doc.contains(key)) return nullptr;
  const json& s = doc[key];
  require_object(s, key);
  check_keys(s, key, allowed);
  return &s;
}

}  // namespace

void apply_json(RunConfig& c, const json& doc) {
  require_object(doc, "config");
  check_keys(doc, "config",
             {"geometry", "driving", "state", "basis", "tolerances", "horizon", "spectrum", "propagate", "scan",
              "rabi", "output_dir", "cache_dir", "threads", "emit_plot"});
  if (const json* s = section(doc, "geometry", {"a0", "b0"})) {
    read(*s, "geometry", "a0", c.a0);
    read(*s, "geometry", "b0", c.b0);
  }
  if (const json* s = section(doc, "driving", {"c", "omega", "omega_grid"})) {
    read(*s, "driving", "c", c.c);
    read(*s, "driving", "omega", c.omega);
    if (s->contains("omega_grid")) {
      const json& g = (*s)["omega_grid"];
      require_object(g, "driving.omega_grid");
      check_keys(g, "driving.omega_grid", {"lo", "hi", "step"});
      read(g, "driving.omega_grid", "lo", c.omega_grid.lo);
      read(g, "driving.omega_grid", "hi", c.omega_grid.hi);
      read(g, "driving.omega_grid", "step", c.omega_grid.step);
    }
  }
  read(doc, "", "state", c.state);
  if (const json* s = section(doc, "basis", {"N", "M", "quad_order", "energy_cutoff"})) {
    read(*s, "basis", "N", c.N);
    read(*s, "basis", "M", c.M);
    read(*s, "basis", "quad_order", c.quad_order);
    read(*s, "basis", "energy_cutoff", c.energy_cutoff);
  }
  if (const json* s = section(doc, "tolerances", {"rel_tol", "abs_tol", "norm_tol"})) {
    read(*s, "tolerances", "rel_tol", c.rel_tol);
    read(*s, "tolerances", "abs_tol", c.abs_tol);
    read(*s, "tolerances", "norm_tol", c.norm_tol);
  }
  if (const json* s = section(doc, "horizon", {"periods", "samples_per_period"})) {
    read(*s, "horizon", "periods", c.periods);
    read(*s, "horizon", "samples_per_period", c.samples_per_period);
  }
  if (const json* s = section(doc, "spectrum", {"e_max"})) read(*s, "spectrum", "e_max", c.spectrum_e_max);
  if (const json* s = section(doc, "propagate", {"method", "partner_energy", "coefficients"})) {
    read(*s, "propagate", "method", c.method);
    read(*s, "propagate", "partner_energy", c.partner_energy);
    read(*s, "propagate", "coefficients", c.coefficients);
  }
  if (const json* s = section(doc, "scan", {"refine"})) read(*s, "scan", "refine", c.refine);
  if (const json* s = section(doc, "rabi", {"levels", "coupling", "calibration_omega", "step"})) {
    read(*s, "rabi", "levels", c.rabi_levels);
    read(*s, "rabi", "coupling", c.rabi_coupling);
    read(*s, "rabi", "calibration_omega", c.calibration_omega);
    read(*s, "rabi", "step", c.rabi_step);
  }
  read(doc, "", "output_dir", c.output_dir);
  read(doc, "", "cache_dir", c.cache_dir);
  read(doc, "", "threads", c.threads);
  read(doc, "", "emit_plot", c.emit_plot);
}

json to_json(const RunConfig& c) {
  json j;
  j["geometry"] = {{"a0", c.a0}, {"b0", c.b0}};
  j["driving"] = {{"c", c.c},
                  {"omega", c.omega},
                  {"omega_grid", {{"lo", c.omega_grid.lo}, {"hi", c.omega_grid.hi}, {"step", c.omega_grid.step}}}};
  j["state"] = c.state;
  j["basis"] = {{"N", c.N}, {"M", c.M}, {"quad_order", c.quad_order}, {"energy_cutoff", c.energy_cutoff}};
  j["tolerances"] = {{"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol}, {"norm_tol", c.norm_tol}};
  j["horizon"] = {{"periods", c.periods}, {"samples_per_period", c.samples_per_period}};
  j["spectrum"] = {{"e_max", c.spectrum_e_max}};
  j["propagate"] = {{"method", c.method}, {"partner_energy", c.partner_energy}, {"coefficients", c.coefficients}};
  j["scan"] = {{"refine", c.refine}};
  j["rabi"] = {{"levels", c.rabi_levels},
               {"coupling", c.rabi_coupling ? json(*c.rabi_coupling) : json(nullptr)},
               {"calibration_omega", c.calibration_omega},
               {"step", c.rabi_step}};
  j["output_dir"] = c.output_dir;
  j["cache_dir"] = c.cache_dir ? json(*c.cache_dir) : json(nullptr);
  j["threads"] = c.threads;
  j["emit_plot"] = c.emit_plot;
  return j;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(c.b0 > 0.0) || !(c.a0 > c.b0)) fail("geometry: need a0 > b0 > 0");
  if (!(c.c >= 0.0) || !(c.c < c.b0)) fail("driving.c: need 0 <= c < b0");
  if (!(c.omega > 0.0)) fail("driving.omega: must be positive");
  if (!(c.omega_grid.lo > 0.0) || !(c.omega_grid.hi >= c.omega_grid.lo) || !(c.omega_grid.step > 0.0)) {
    fail("driving.omega_grid: need 0 < lo <= hi and step > 0");
  }
  if (c.state < 1) fail("state: labels start at 1");
  if (c.N < 1 || c.M < 0) fail("basis: need N >= 1 and M >= 0");
  if (c.quad_order < 1) fail("basis.quad_order: must be positive");
  if (!(c.energy_cutoff > 0.0)) fail("basis.energy_cutoff: must be positive");
  if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0) || !(c.norm_tol > 0.0)) fail("tolerances: must be positive");
  if (c.periods < 1) fail("horizon.periods: must be >= 1");
  if (c.samples_per_period < 40) fail("horizon.samples_per_period: must be >= 40");
  if (!(c.spectrum_e_max > 0.0)) fail("spectrum.e_max: must be positive");
  if (c.method != "periodic" && c.method != "direct") fail("propagate.method: 'periodic' or 'direct'");
  if (!(c.partner_energy > 0.0)) fail("propagate.partner_energy: must be positive");
  if (c.rabi_levels.size() < 2) fail("rabi.levels: need at least two levels");
  if (std::any_of(c.rabi_levels.begin(), c.rabi_levels.end(), [](int l) { return l < 1; })) {
    fail("rabi.levels: labels start at 1");
  }
  if (c.rabi_coupling && !(*c.rabi_coupling >= 0.0)) fail("rabi.coupling: must be non-negative");
  if (!(c.calibration_omega > 0.0)) fail("rabi.calibration_omega: must be positive");
  if (!(c.rabi_step > 0.0)) fail("rabi.step: must be positive");
  if (c.output_dir.empty()) fail("output_dir: must not be empty");
  if (c.threads < 0) fail("threads: must be >= 0");
}

}  // namespace ebill::cli
