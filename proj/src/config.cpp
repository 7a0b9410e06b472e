#include "beclab/config.hpp"

#include "beclab/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace beclab {

namespace {

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void reject_unknown(const Json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

Json bump_json(std::vector<double> center, double width, double re, double im) {
  return Json{{"center", center}, {"width", width}, {"amplitude", {re, im}}, {"component", 0}};
}

}  // namespace

Json default_config_document() {
  Json doc;
  doc["dispersion"] = {{"name", "quadratic"},
                       {"dim", 3},
                       {"growth_exponent", 4.0},
                       {"omega0", 1.0},
                       {"coefficient", 1.0},
                       {"chemical_potential", 0.0},
                       {"internal_components", 1}};
  doc["hubbard"] = {{"sites", 2},          {"electrons", 2},   {"hopping", 1.0},
                    {"periodic", false},   {"repulsion", 2.0}, {"coupling", 0.2},
                    {"kappa", 0.5},        {"uv_width", 2.0},  {"mode_box_size", 6.283185307179586},
                    {"modes", 2},          {"dimension_cap", 20000}};
  doc["thermo"] = {{"beta", 1.0}, {"density_ratio", 2.0}, {"infrared_number", 0.0}};
  doc["sweep"] = {{"box_sizes", {10.0, 20.0, 40.0, 80.0}},
                  {"level_caps", {6, 9, 12}},
                  {"betas", {0.5, 1.0, 2.0}},
                  {"density_ratios", {0.5, 1.0, 2.0}},
                  {"beta_lo", 0.05},
                  {"beta_hi", 20.0}};
  doc["bec"] = {{"test_functions",
                 {bump_json({1.5, 0.0, 0.0}, 0.3, 1.0, 0.5), bump_json({0.0, 0.0, 0.0}, 0.5, 1.0, 0.0),
                  bump_json({0.4, -0.2, 0.1}, 0.4, 0.3, -0.7)}},
                {"r_values", {0.0, 0.5, 1.0, 2.0}},
                {"theta_values", {0.0, 1.0471975511965976, 3.141592653589793}},
                {"evolution_time", 0.5},
                {"factorization_cases", 5}};
  doc["tolerances"] = {{"condensate_rel", 0.05}, {"extrapolated_rel", 0.01}, {"identity", 1e-3},
                       {"factorization", 1e-3},  {"monotone_floor", 1e-12},  {"decomposition", 1e-6},
                       {"gauge", 1e-12},         {"fingerprint", 1e-9},      {"limits_rel", 1e-2}};
  doc["seed"] = 20240917;
  doc["output"] = {{"directory", "beclab-out"}};
  return doc;
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  }
  const std::string path = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::exception&) {
    value = raw;
  }
  Json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty path segment");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    Json& next = (*node)[parts[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) throw ConfigError("override '" + assignment + "': '" + parts[i] + "' is not a section");
    node = &next;
  }
  (*node)[parts.back()] = value;
}

ExperimentConfig parse_config(const Json& doc) {
  reject_unknown(doc, {"dispersion", "hubbard", "thermo", "sweep", "bec", "tolerances", "seed", "output"},
                 "config");
  ExperimentConfig c;
  c.document = doc;
  if (doc.contains("dispersion")) {
    const Json& d = doc["dispersion"];
    reject_unknown(d, {"name", "dim", "growth_exponent", "omega0", "coefficient", "mass", "speed", "table",
                       "chemical_potential", "internal_components"},
                   "dispersion");
    auto& o = c.dispersion;
    read(d, "name", o.name, "dispersion");
    read(d, "dim", o.dim, "dispersion");
    read(d, "growth_exponent", o.growth_exponent, "dispersion");
    read(d, "omega0", o.omega0, "dispersion");
    read(d, "coefficient", o.coefficient, "dispersion");
    read(d, "mass", o.mass, "dispersion");
    read(d, "speed", o.speed, "dispersion");
    read(d, "chemical_potential", o.chemical_potential, "dispersion");
    read(d, "internal_components", o.internal_components, "dispersion");
    if (d.contains("table")) {
      const Json& t = d["table"];
      reject_unknown(t, {"k", "r", "dr"}, "dispersion.table");
      read(t, "k", o.table_k, "dispersion.table");
      read(t, "r", o.table_r, "dispersion.table");
      read(t, "dr", o.table_dr, "dispersion.table");
    }
  }
  if (doc.contains("hubbard")) {
    const Json& h = doc["hubbard"];
    reject_unknown(h, {"sites", "electrons", "hopping", "hopping_matrix", "periodic", "repulsion", "coupling",
                       "kappa", "uv_width", "mode_box_size", "modes", "dimension_cap"},
                   "hubbard");
    auto& o = c.hubbard;
    read(h, "sites", o.sites, "hubbard");
    read(h, "electrons", o.electrons, "hubbard");
    read(h, "hopping", o.hopping, "hubbard");
    read(h, "hopping_matrix", o.hopping_matrix, "hubbard");
    read(h, "periodic", o.periodic, "hubbard");
    read(h, "repulsion", o.repulsion, "hubbard");
    read(h, "coupling", o.coupling, "hubbard");
    read(h, "kappa", o.kappa, "hubbard");
    read(h, "uv_width", o.uv_width, "hubbard");
    read(h, "mode_box_size", o.mode_box_size, "hubbard");
    read(h, "modes", o.modes, "hubbard");
    read(h, "dimension_cap", o.dimension_cap, "hubbard");
  }
  if (doc.contains("thermo")) {
    const Json& t = doc["thermo"];
    reject_unknown(t, {"beta", "temperature", "density", "density_ratio", "infrared_number"}, "thermo");
    const bool has_beta = t.contains("beta") && !t["beta"].is_null();
    const bool has_temp = t.contains("temperature") && !t["temperature"].is_null();
    if (has_beta == has_temp) throw ConfigError("thermo: give exactly one of beta or temperature");
    if (has_beta) {
      read(t, "beta", c.thermo.beta, "thermo");
    } else {
      double temp = 0.0;
      read(t, "temperature", temp, "thermo");
      if (!(temp > 0.0)) throw ConfigError("thermo.temperature must be positive");
      c.thermo.beta = 1.0 / temp;
    }
    if (!(c.thermo.beta > 0.0)) throw ConfigError("thermo.beta must be positive");
    const bool has_density = t.contains("density") && !t["density"].is_null();
    const bool has_ratio = t.contains("density_ratio") && !t["density_ratio"].is_null();
    if (has_density && has_ratio) throw ConfigError("thermo: give at most one of density or density_ratio");
    if (has_density) {
      read(t, "density", c.thermo.density, "thermo");
      if (!(c.thermo.density > 0.0)) throw ConfigError("thermo.density must be positive");
      c.thermo.density_ratio = 0.0;
    }
    read(t, "density_ratio", c.thermo.density_ratio, "thermo");
    read(t, "infrared_number", c.thermo.infrared_number, "thermo");
  }
  if (doc.contains("sweep")) {
    const Json& s = doc["sweep"];
    reject_unknown(s, {"box_sizes", "level_caps", "betas", "density_ratios", "beta_lo", "beta_hi"}, "sweep");
    read(s, "box_sizes", c.sweep.box_sizes, "sweep");
    read(s, "level_caps", c.sweep.level_caps, "sweep");
    read(s, "betas", c.sweep.betas, "sweep");
    read(s, "density_ratios", c.sweep.density_ratios, "sweep");
    read(s, "beta_lo", c.sweep.beta_lo, "sweep");
    read(s, "beta_hi", c.sweep.beta_hi, "sweep");
  }
  if (doc.contains("bec")) {
    const Json& b = doc["bec"];
    reject_unknown(b, {"test_functions", "r_values", "theta_values", "evolution_time", "factorization_cases"},
                   "bec");
    if (b.contains("test_functions")) {
      for (const Json& f : b["test_functions"]) {
        reject_unknown(f, {"center", "width", "amplitude", "component"}, "bec.test_functions[]");
        GaussianBump bump;
        read(f, "center", bump.center, "bec.test_functions[]");
        read(f, "width", bump.width, "bec.test_functions[]");
        std::vector<double> amp{1.0, 0.0};
        read(f, "amplitude", amp, "bec.test_functions[]");
        if (amp.size() != 2) throw ConfigError("bec.test_functions[].amplitude must be [re, im]");
        bump.amplitude = {amp[0], amp[1]};
        read(f, "component", bump.component, "bec.test_functions[]");
        c.bec.test_functions.push_back(bump);
      }
    }
    read(b, "r_values", c.bec.r_values, "bec");
    read(b, "theta_values", c.bec.theta_values, "bec");
    read(b, "evolution_time", c.bec.evolution_time, "bec");
    read(b, "factorization_cases", c.bec.factorization_cases, "bec");
  }
  if (doc.contains("tolerances")) {
    const Json& t = doc["tolerances"];
    reject_unknown(t, {"condensate_rel", "extrapolated_rel", "identity", "factorization", "monotone_floor",
                       "decomposition", "gauge", "fingerprint", "limits_rel"},
                   "tolerances");
    auto& o = c.tolerances;
    read(t, "condensate_rel", o.condensate_rel, "tolerances");
    read(t, "extrapolated_rel", o.extrapolated_rel, "tolerances");
    read(t, "identity", o.identity, "tolerances");
    read(t, "factorization", o.factorization, "tolerances");
    read(t, "monotone_floor", o.monotone_floor, "tolerances");
    read(t, "decomposition", o.decomposition, "tolerances");
    read(t, "gauge", o.gauge, "tolerances");
    read(t, "fingerprint", o.fingerprint, "tolerances");
    read(t, "limits_rel", o.limits_rel, "tolerances");
  }
  read(doc, "seed", c.seed, "config");
  if (doc.contains("output")) {
    reject_unknown(doc["output"], {"directory"}, "output");
    read(doc["output"], "directory", c.output_directory, "output");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  Json doc = default_config_document();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Json user;
    try {
      user = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!user.is_object()) throw ConfigError("config file must hold a JSON object");
    // A user section replaces the thermo choice wholesale so beta / temperature stay exclusive.
    if (user.contains("thermo")) doc["thermo"] = Json::object();
    doc.merge_patch(user);
  }
  for (const auto& o : overrides) {
    // Switching to temperature (or density) drops the default alternative.
    if (o.rfind("thermo.temperature=", 0) == 0) doc["thermo"].erase("beta");
    if (o.rfind("thermo.beta=", 0) == 0) doc["thermo"].erase("temperature");
    if (o.rfind("thermo.density=", 0) == 0) doc["thermo"].erase("density_ratio");
    if (o.rfind("thermo.density_ratio=", 0) == 0) doc["thermo"].erase("density");
    apply_override(doc, o);
  }
  return parse_config(doc);
}

std::uint64_t config_hash(const Json& doc) {
  const std::string s = doc.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

Dispersion make_dispersion(const DispersionConfig& c) {
  Dispersion::Parameters p{c.name, c.dim, c.growth_exponent, c.chemical_potential, c.internal_components};
  if (c.name == "quadratic") return quadratic_dispersion(c.omega0, c.coefficient, p);
  if (c.name == "relativistic") return relativistic_dispersion(c.mass, p);
  if (c.name == "linear") return linear_dispersion(c.omega0, c.speed, p);
  if (c.name == "table") return tabulated_dispersion(c.table_k, c.table_r, c.table_dr, p);
  throw ConfigError("dispersion.name '" + c.name + "' is not one of quadratic, relativistic, linear, table");
}

HubbardSystem make_hubbard_system(const ExperimentConfig& c) {
  const HubbardConfig& h = c.hubbard;
  CMatrix t;
  if (!h.hopping_matrix.empty()) {
    const auto n = static_cast<Eigen::Index>(h.hopping_matrix.size());
    if (n != h.sites) throw ConfigError("hubbard.hopping_matrix must be sites x sites");
    t = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(h.hopping_matrix[i].size()) != n) {
        throw ConfigError("hubbard.hopping_matrix must be square");
      }
      for (Eigen::Index j = 0; j < n; ++j) t(i, j) = h.hopping_matrix[i][j];
    }
  } else {
    t = chain_hopping(h.sites, h.hopping, h.periodic);
  }
  return HubbardSystem(FermionSector(h.sites, h.electrons), t, h.repulsion, h.coupling, c.thermo.beta);
}

CoupledSystem make_coupled_system(const ExperimentConfig& c) {
  const HubbardConfig& h = c.hubbard;
  const Dispersion disp = make_dispersion(c.dispersion);
  CoupledSystem sys{make_hubbard_system(c), CouplingFamily::chain(h.sites, disp.dim(), h.uv_width), disp,
                    select_lattice_modes(h.mode_box_size, disp.dim(), h.kappa, h.modes), h.kappa,
                    static_cast<Eigen::Index>(h.dimension_cap)};
  check_coupled_system(sys);
  return sys;
}

std::vector<TestFunction> make_test_functions(const ExperimentConfig& c) {
  std::vector<TestFunction> out;
  for (const auto& b : c.bec.test_functions) {
    if (static_cast<int>(b.center.size()) != c.dispersion.dim) {
      throw ConfigError("bec.test_functions[].center must have dispersion.dim entries");
    }
    out.emplace_back(c.dispersion.dim, std::vector<GaussianBump>{b}, c.dispersion.internal_components);
  }
  return out;
}

}  // namespace beclab
