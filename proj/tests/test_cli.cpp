#include "beclab/config.hpp"
#include "beclab/runner.hpp"

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beclab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("beclab-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

int run_cmd(const std::string& command, const fs::path& out, std::vector<std::string> overrides = {},
            std::ostream* err = nullptr) {
  std::ostringstream sink;
  RunOptions o;
  o.command = command;
  o.out_dir = out.string();
  o.overrides = std::move(overrides);
  return run(o, err ? *err : sink);
}

}  // namespace

TEST_CASE("configuration parsing") {
  const ExperimentConfig c = parse_config(default_config_document());
  CHECK(c.thermo.beta == 1.0);
  CHECK(c.dispersion.dim == 3);
  CHECK(c.tolerances.identity == 1e-3);

  Json doc = default_config_document();
  apply_override(doc, "thermo.temperature=4");
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc["thermo"].erase("beta");
  CHECK(parse_config(doc).thermo.beta == doctest::Approx(0.25));
  doc["thermo"].erase("temperature");
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  const ExperimentConfig o = load_config("", {"thermo.temperature=2", "hubbard.hopping=0.5", "dispersion.name=linear"});
  CHECK(o.thermo.beta == 0.5);
  CHECK(o.hubbard.hopping == 0.5);
  CHECK(o.dispersion.name == "linear");

  CHECK_THROWS_AS(load_config("", {"thermo.bogus=1"}), ConfigError);
  CHECK_THROWS_AS(load_config("", {"no_equals_sign"}), ConfigError);
  CHECK_THROWS_AS(load_config("", {"hubbard.sites=\"two\""}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json", {}), ConfigError);

  const Json base = default_config_document();
  Json other = base;
  apply_override(other, "seed=7");
  CHECK(config_hash(base) == config_hash(default_config_document()));
  CHECK(config_hash(base) != config_hash(other));
}

TEST_CASE("config file merge") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"thermo": {"temperature": 0.5, "density_ratio": 3}, "sweep": {"box_sizes": [8, 16]}})";
  const ExperimentConfig c = load_config((dir / "c.json").string(), {});
  CHECK(c.thermo.beta == 2.0);
  CHECK(c.thermo.density_ratio == 3.0);
  CHECK(c.sweep.box_sizes == std::vector<double>{8.0, 16.0});
  CHECK(c.hubbard.sites == 2);
}

TEST_CASE("validate command") {
  const fs::path out = scratch("validate");
  CHECK(run_cmd("validate", out) == kExitSuccess);
  const Json v = Json::parse(slurp(out / "validation.json"));
  CHECK(v["all_passed"] == true);
  const Json m = Json::parse(slurp(out / "manifest.json"));
  CHECK(m["seed"] == 20240917);
  CHECK(m["operations"].size() >= 2);

  std::ostringstream err;
  CHECK(run_cmd("validate", scratch("validate-bad"), {"dispersion.chemical_potential=2"}, &err) == kExitValidation);
  CHECK(err.str().find("gap_above_chemical_potential") != std::string::npos);
  CHECK(run_cmd("nonsense", scratch("validate-cmd")) == kExitValidation);
}

TEST_CASE("condense command") {
  const fs::path out = scratch("condense");
  REQUIRE(run_cmd("condense", out, {"sweep.box_sizes=[10,20,40]"}) == kExitSuccess);
  std::ifstream csv(out / "condense.csv");
  std::string line, last;
  std::getline(csv, line);
  CHECK(line == "L,y_L,residual,N_b0_over_Ld,phase");
  while (std::getline(csv, line)) last = line;
  const auto cells = split(last);
  REQUIRE(cells.size() == 5);
  CHECK(cells[0] == "40");
  const Json j = Json::parse(slurp(out / "condense.json"));
  const double expected = j["rho_bar"].get<double>() - j["rho_crit"].get<double>();
  // The L = 40 row still carries a ~10% finite-size excess; the 1/L fit removes it.
  CHECK(std::stod(cells[3]) > expected);
  CHECK(std::abs(j["extrapolated_limit"].get<double>() - expected) <= 0.05 * expected);

  // Identical config, identical bytes.
  const fs::path again = scratch("condense-again");
  REQUIRE(run_cmd("condense", again, {"sweep.box_sizes=[10,20,40]"}) == kExitSuccess);
  for (const char* f : {"condense.csv", "condense.json", "manifest.json"}) {
    CHECK(slurp(out / f) == slurp(again / f));
  }
}

TEST_CASE("numerical failures map to exit code 3") {
  std::ostringstream err;
  const int code = run_cmd("condense", scratch("condense-ir"),
                           {"thermo.density=0.001", "thermo.infrared_number=50", "sweep.box_sizes=[10]"}, &err);
  CHECK(code == kExitNumerical);
  CHECK(err.str().find("condensate_sequence") != std::string::npos);
}

TEST_CASE("decouple-verify command") {
  const fs::path out = scratch("decouple");
  std::ostringstream err;
  const int code = run_cmd("decouple-verify", out, {"bec.factorization_cases=1"}, &err);
  const Json j = Json::parse(slurp(out / "decouple.json"));
  CHECK(j["identity"]["monotone"] == true);
  CHECK(j["identity"]["within_tolerance"] == true);
  // The default chain has t = 1; its factorization gap does not close (see README).
  CHECK(j["hopping_is_diagonal"] == false);
  CHECK(code == (j["factorization"]["within_tolerance"] == true && j["factorization"]["monotone"] == true
                     ? kExitSuccess
                     : kExitVerification));

  const fs::path diag = scratch("decouple-diag");
  CHECK(run_cmd("decouple-verify", diag, {"hubbard.hopping=0"}) == kExitSuccess);
}

TEST_CASE("output directory from the environment") {
  const fs::path env_dir = scratch("env");
  setenv(kOutDirEnv, env_dir.c_str(), 1);
  const fs::path cli_dir = scratch("env-cli");
  CHECK(run_cmd("validate", cli_dir) == kExitSuccess);
  unsetenv(kOutDirEnv);
  CHECK(fs::exists(env_dir / "validation.json"));
  CHECK_FALSE(fs::exists(cli_dir / "validation.json"));
}

TEST_CASE("fingerprint and bec-states commands") {
  const fs::path fp = scratch("fp");
  CHECK(run_cmd("fingerprint", fp) == kExitSuccess);
  const Json j = Json::parse(slurp(fp / "fingerprint.json"));
  CHECK(j["rank"] == j["columns"]);
  CHECK(j["recovery_max_error"].get<double>() <= 1e-9);
  CHECK(run_cmd("fingerprint", scratch("fp-normal"), {"thermo.density_ratio=0.5"}) == kExitValidation);
  const fs::path bec = scratch("bec");
  CHECK(run_cmd("bec-states", bec, {"sweep.box_sizes=[10,20,40]"}) == kExitSuccess);
  CHECK(fs::exists(bec / "limits.csv"));
  CHECK(fs::exists(bec / "decomposition.csv"));
}

TEST_CASE("parallel sweeps are deterministic") {
  const fs::path one = scratch("pd1"), four = scratch("pd4");
  std::ostringstream sink;
  RunOptions o;
  o.command = "phase-diagram";
  o.out_dir = one.string();
  REQUIRE(run(o, sink) == kExitSuccess);
  o.out_dir = four.string();
  o.threads = 4;
  REQUIRE(run(o, sink) == kExitSuccess);
  for (const char* f : {"phase_diagram.csv", "critical_temperature.csv", "phase_diagram.json"}) {
    CHECK(slurp(one / f) == slurp(four / f));
  }
}
