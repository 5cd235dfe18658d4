#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "cli.hpp"
#include "run_config.hpp"

using namespace ebill::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ebill_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_in(const fs::path& dir, std::vector<std::string> args) {
  args.push_back("--output-dir");
  args.push_back(dir.string());
  return run(args);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("spectrum output, sidecar and byte-identical reruns") {
    const fs::path a = scratch("spec_a"), b = scratch("spec_b");
    REQUIRE(run_in(a, {"spectrum", "--emit-plot"}) == kExitOk);
    REQUIRE(run_in(b, {"spectrum", "--emit-plot"}) == kExitOk);
    const auto rows = read_csv(a / "spectrum.csv");
    REQUIRE(rows.size() == 15);
    CHECK(rows[0][0] == "label");
    CHECK(std::stod(rows[4][1]) == doctest::Approx(15.993).epsilon(1e-3));
    for (const char* f : {"spectrum.csv", "phase_energies.csv", "fig1.gp"}) {
      CAPTURE(f);
      REQUIRE(fs::exists(a / f));
      CHECK(slurp(a / f) == slurp(b / f));
    }
    // Sidecars differ only in the output directory they record.
    json side = json::parse(slurp(a / "spectrum.json"));
    json other = json::parse(slurp(b / "spectrum.json"));
    CHECK(side["config"]["output_dir"] == a.string());
    side["config"].erase("output_dir");
    other["config"].erase("output_dir");
    CHECK(side == other);
    CHECK(side["command"] == "spectrum");
    CHECK(side["config"]["driving"]["c"] == 0.1);
    CHECK(side["versions"].contains("eigen"));
    CHECK(side["outputs"]["spectrum.csv"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("configuration errors exit with 2, I/O errors with 4") {
    const fs::path d = scratch("errors");
    CHECK(run_in(d, {"spectrum", "--a0", "0.5"}) == kExitConfig);
    CHECK(run_in(d, {"spectrum", "--bogus"}) == kExitConfig);
    CHECK(run_in(d, {}) == kExitConfig);
    CHECK(run_in(d, {"propagate", "--method", "magic"}) == kExitConfig);
    CHECK(run_in(d, {"spectrum", "--config", (d / "absent.json").string()}) == kExitIo);

    std::ofstream(d / "bad.json") << "{\"driving\": {\"c\": 0.1, \"colour\": 3}}";
    CHECK(run_in(d, {"spectrum", "--config", (d / "bad.json").string()}) == kExitConfig);
    std::ofstream(d / "broken.json") << "{\"driving\": ";
    CHECK(run_in(d, {"spectrum", "--config", (d / "broken.json").string()}) == kExitConfig);
    std::ofstream(d / "typed.json") << "{\"state\": \"four\"}";
    CHECK(run_in(d, {"spectrum", "--config", (d / "typed.json").string()}) == kExitConfig);
    fs::remove_all(d);
  }

  TEST_CASE("flags override the config file") {
    const fs::path d = scratch("override");
    std::ofstream(d / "cfg.json") << "{\"driving\": {\"omega\": 7.5}, \"state\": 1}";
    REQUIRE(run_in(d, {"spectrum", "--config", (d / "cfg.json").string(), "--state", "4"}) == kExitOk);
    const json side = json::parse(slurp(d / "spectrum.json"));
    CHECK(side["config"]["driving"]["omega"] == 7.5);
    CHECK(side["config"]["state"] == 4);
    fs::remove_all(d);
  }

  TEST_CASE("table cache: reuse from the environment and corruption") {
    const fs::path d = scratch("cache"), cache = d / "tables";
    ::setenv(kCacheEnv, cache.string().c_str(), 1);
    REQUIRE(run_in(d, {"tables", "--radial", "6", "--angular", "6"}) == kExitOk);
    ::unsetenv(kCacheEnv);
    const fs::path file = cache / "tables_N6_M6_q64.ebt";
    REQUIRE(fs::exists(file));

    std::string bytes = slurp(file);
    bytes[bytes.size() - 5] = static_cast<char>(bytes[bytes.size() - 5] ^ 0x33);
    std::ofstream(file, std::ios::binary | std::ios::trunc) << bytes;
    CHECK(run_in(d, {"propagate", "--radial", "6", "--angular", "6", "--cache-dir", cache.string(), "--periods",
                     "2"}) == kExitIo);
    fs::remove_all(d);
  }

  TEST_CASE("propagation on a static ellipse is flat") {
    const fs::path d = scratch("flat");
    REQUIRE(run_in(d, {"propagate", "-c", "0", "--periods", "3", "--coefficients", "--emit-plot"}) == kExitOk);
    const auto rows = read_csv(d / "energy.csv");
    REQUIRE(rows.size() == 3 * 64 + 2);
    const double e0 = std::stod(rows[1][1]);
    CHECK(e0 == doctest::Approx(15.993).epsilon(1e-3));
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::stod(rows[k][1]) == doctest::Approx(e0).epsilon(1e-7));
    CHECK(fs::exists(d / "populations.csv"));
    CHECK(fs::exists(d / "coefficients.csv"));
    CHECK(fs::exists(d / "energy.gp"));
    const json side = json::parse(slurp(d / "propagate.json"));
    CHECK(side["results"]["max_norm_drift"].get<double>() < 1e-8);
    CHECK(side["outputs"].size() == 5);
    fs::remove_all(d);
  }

  TEST_CASE("scan output does not depend on the thread count") {
    const fs::path a = scratch("scan_a"), b = scratch("scan_b");
    const std::vector<std::string> common{"scan", "--omega-min", "5.0", "--omega-max", "5.1", "--omega-step", "0.05",
                                          "--periods", "40", "--refine", "false"};
    auto with = [&](std::vector<std::string> v, const char* j) {
      v.push_back("-j");
      v.push_back(j);
      return v;
    };
    REQUIRE(run_in(a, with(common, "1")) == kExitOk);
    REQUIRE(run_in(b, with(common, "3")) == kExitOk);
    CHECK(slurp(a / "scan.csv") == slurp(b / "scan.csv"));
    const auto rows = read_csv(a / "scan.csv");
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[1][0]) < std::stod(rows[2][0]));
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("config JSON round trip and validation") {
    RunConfig c;
    c.omega = 9.25;
    c.rabi_levels = {1, 4, 7};
    c.cache_dir = "/tmp/x";
    const json j = to_json(c);
    RunConfig back;
    apply_json(back, j);
    CHECK(to_json(back) == j);
    CHECK_NOTHROW(validate(back));

    RunConfig bad;
    bad.samples_per_period = 20;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = RunConfig{};
    bad.rabi_levels = {};
    CHECK_THROWS_AS(validate(bad), ConfigError);
    CHECK_THROWS_AS(apply_json(bad, json{{"nonsense", 1}}), ConfigError);
    CHECK_THROWS_AS(apply_json(bad, json::array()), ConfigError);
  }
}
