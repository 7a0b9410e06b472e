#pragma once

// Experiment configuration: one JSON document, dotted-path overrides and the
// objects (dispersion, Hubbard fixture, coupled system) it describes.

#include "beclab/decoupling.hpp"
#include "beclab/dispersion.hpp"
#include "beclab/hubbard.hpp"
#include "beclab/test_function.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace beclab {

using Json = nlohmann::json;

/// Raised for malformed or inconsistent configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DispersionConfig {
  std::string name = "quadratic";  // quadratic | relativistic | linear | table
  int dim = 3;
  double growth_exponent = 4.0;
  double omega0 = 1.0;
  double coefficient = 1.0;  // quadratic
  double mass = 1.0;         // relativistic
  double speed = 1.0;        // linear
  std::vector<double> table_k, table_r, table_dr;
  double chemical_potential = 0.0;
  int internal_components = 1;
};

struct HubbardConfig {
  int sites = 2;
  int electrons = 2;
  double hopping = 1.0;  // chain amplitude t when no matrix is given
  std::vector<std::vector<double>> hopping_matrix;
  bool periodic = false;
  double repulsion = 2.0;
  double coupling = 0.2;
  double kappa = 0.5;
  double uv_width = 2.0;
  double mode_box_size = 6.283185307179586;
  int modes = 2;
  std::int64_t dimension_cap = 20000;
};

struct ThermoConfig {
  double beta = 1.0;
  double density = 0.0;        // rho_bar; 0 means use density_ratio * rho_crit
  double density_ratio = 2.0;
  double infrared_number = 0.0;
};

struct SweepConfig {
  std::vector<double> box_sizes{10.0, 20.0, 40.0, 80.0};
  std::vector<int> level_caps{6, 9, 12};
  std::vector<double> betas{0.5, 1.0, 2.0};
  std::vector<double> density_ratios{0.5, 1.0, 2.0};
  double beta_lo = 0.05;
  double beta_hi = 20.0;
};

struct BecConfig {
  std::vector<GaussianBump> test_functions;
  std::vector<double> r_values{0.0, 0.5, 1.0, 2.0};
  std::vector<double> theta_values{0.0, 1.0471975511965976, 3.141592653589793};
  double evolution_time = 0.5;
  int factorization_cases = 5;
};

struct Tolerances {
  double condensate_rel = 0.05;
  double extrapolated_rel = 0.01;
  double identity = 1e-3;
  double factorization = 1e-3;
  double monotone_floor = 1e-12;
  double decomposition = 1e-6;
  double gauge = 1e-12;
  double fingerprint = 1e-9;
  double limits_rel = 1e-2;
};

struct ExperimentConfig {
  DispersionConfig dispersion;
  HubbardConfig hubbard;
  ThermoConfig thermo;
  SweepConfig sweep;
  BecConfig bec;
  Tolerances tolerances;
  std::uint64_t seed = 20240917;
  std::string output_directory = "beclab-out";
  Json document;  // the merged document after overrides
};

/// Default document; every key the parser understands appears here.
Json default_config_document();

/// Sets the value at a dotted path ("thermo.beta=2"); the value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(Json& doc, const std::string& assignment);

/// Parses a merged document. Throws ConfigError on unknown sections, type
/// errors, or when both or neither of beta / temperature are given.
ExperimentConfig parse_config(const Json& doc);

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

/// 64-bit FNV-1a of the compact canonical dump.
std::uint64_t config_hash(const Json& doc);

Dispersion make_dispersion(const DispersionConfig& c);
HubbardSystem make_hubbard_system(const ExperimentConfig& c);
CoupledSystem make_coupled_system(const ExperimentConfig& c);
std::vector<TestFunction> make_test_functions(const ExperimentConfig& c);

}  // namespace beclab
