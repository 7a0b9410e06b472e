#include "beclab/runner.hpp"

#include "beclab/bec_states.hpp"
#include "beclab/condensation.hpp"
#include "beclab/errors.hpp"
#include "beclab/phonon_gas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace beclab {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::vector<FactorizationCase> random_factorization_cases(const CoupledSystem& sys, int count,
                                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Eigen::Index n = sys.hubbard.sector.dim();
  std::vector<FactorizationCase> out;
  for (int c = 0; c < count; ++c) {
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(unit(rng), unit(rng));
    }
    FactorizationCase fc;
    fc.a_e = 0.5 * (a + a.adjoint());
    for (int j = 0; j < sys.num_modes(); ++j) {
      fc.f.push_back(std::polar(0.6 * std::abs(unit(rng)), M_PI * unit(rng)));
    }
    out.push_back(std::move(fc));
  }
  return out;
}

ArtifactWriter::ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void ArtifactWriter::begin(const std::string& operation, Json parameters) {
  current_ = operation;
  log_.push_back({{"operation", operation}, {"parameters", std::move(parameters)}, {"outputs", Json::array()}});
}

void ArtifactWriter::write_csv(const std::string& name, const std::vector<std::string>& header,
                               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(dir_ / name, std::ios::binary);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!log_.empty()) log_.back()["outputs"].push_back(name);
}

void ArtifactWriter::write_json(const std::string& name, const Json& value) {
  std::ofstream out(dir_ / name, std::ios::binary);
  out << value.dump(2) << '\n';
  if (!log_.empty()) log_.back()["outputs"].push_back(name);
}

void ArtifactWriter::write_manifest(const ExperimentConfig& config, const std::string& command, int exit_code) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config.document)));
  Json m{{"command", command},
         {"config_hash", hash},
         {"seed", config.seed},
         {"exit_code", exit_code},
         {"config", config.document},
         {"operations", log_}};
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << m.dump(2) << '\n';
}

namespace {

using Rows = std::vector<std::vector<std::string>>;
std::string fd(double x) { return format_double(x); }

Json report_json(const ValidationReport& r) {
  Json out = Json::array();
  for (const auto& c : r.checks) {
    out.push_back({{"condition", c.name}, {"passed", c.passed}, {"witness", c.witness}, {"detail", c.detail}});
  }
  return out;
}

double resolve_density(const ExperimentConfig& c, const Dispersion& disp, double beta) {
  return c.thermo.density > 0.0 ? c.thermo.density : c.thermo.density_ratio * rho_crit(disp, beta);
}

class Session {
 public:
  Session(const ExperimentConfig& c, ArtifactWriter& w, int threads, std::ostream& err)
      : c_(c), w_(w), threads_(threads), err_(err), disp_(make_dispersion(c.dispersion)) {}

  // Returns the summary of each command; failed verifications are collected in failures_.
  Json validate() {
    w_.begin("validate_dispersion", {{"beta", c_.thermo.beta}});
    const ValidationReport dr = validate_dispersion(disp_, c_.thermo.beta);
    w_.begin("validate_coupling", {{"kappa", c_.hubbard.kappa}, {"uv_width", c_.hubbard.uv_width}});
    const CouplingFamily family = CouplingFamily::chain(c_.hubbard.sites, disp_.dim(), c_.hubbard.uv_width);
    const ValidationReport cr = validate_coupling(family, disp_, c_.hubbard.kappa);
    Json out{{"dispersion", report_json(dr)}, {"coupling", report_json(cr)},
             {"all_passed", dr.all_passed() && cr.all_passed()}};
    w_.write_json("validation.json", out);
    std::vector<std::string> failed = dr.failures();
    for (const auto& f : cr.failures()) failed.push_back(f);
    if (!failed.empty()) {
      std::string msg = "validation failed:";
      for (const auto& f : failed) msg += " " + f;
      throw DomainError(msg);
    }
    return out;
  }

  Json condense() {
    const double beta = c_.thermo.beta;
    w_.begin("rho_crit", {{"beta", beta}});
    const double rc = rho_crit(disp_, beta);
    const double rho_bar = resolve_density(c_, disp_, beta);
    w_.begin("condensate_sequence", {{"box_sizes", c_.sweep.box_sizes}, {"rho_bar", rho_bar}, {"beta", beta},
                                     {"infrared_number", c_.thermo.infrared_number}});
    const CondensateSequence seq =
        condensate_sequence(c_.sweep.box_sizes, rho_bar, beta, disp_, c_.thermo.infrared_number);
    Rows rows;
    for (const auto& p : seq.points) {
      rows.push_back({fd(p.L), fd(1.0 + p.s), fd(p.residual), fd(p.N_b0_over_Ld), to_string(seq.phase.phase)});
    }
    w_.write_csv("condense.csv", {"L", "y_L", "residual", "N_b0_over_Ld", "phase"}, rows);
    const double expected = seq.phase.condensate_density;
    const double last = seq.points.empty() ? 0.0 : seq.points.back().N_b0_over_Ld;
    Json out{{"rho_crit", rc},
             {"rho_bar", rho_bar},
             {"phase", to_string(seq.phase.phase)},
             {"condensate_density", expected},
             {"extrapolated_limit", seq.extrapolated_limit},
             {"slope", seq.slope},
             {"last_N_b0_over_Ld", last},
             {"tolerances", {{"condensate_rel", c_.tolerances.condensate_rel},
                             {"extrapolated_rel", c_.tolerances.extrapolated_rel}}}};
    if (expected > 0.0) {
      out["last_relative_error"] = std::abs(last - expected) / expected;
      out["extrapolated_relative_error"] = std::abs(seq.extrapolated_limit - expected) / expected;
    }
    w_.write_json("condense.json", out);
    return out;
  }

  Json phase_diagram() {
    const auto& betas = c_.sweep.betas;
    const auto& ratios = c_.sweep.density_ratios;
    w_.begin("rho_crit", {{"beta", c_.thermo.beta}});
    const double rc_ref = rho_crit(disp_, c_.thermo.beta);
    w_.begin("classify_phase", {{"betas", betas}, {"density_ratios", ratios}, {"reference_rho_crit", rc_ref}});
    std::vector<PhaseReport> grid(betas.size() * ratios.size());
    parallel_for(grid.size(), threads_, [&](std::size_t i) {
      grid[i] = classify_phase(ratios[i % ratios.size()] * rc_ref, betas[i / ratios.size()], disp_);
    });
    Rows rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double b = betas[i / ratios.size()], rho = ratios[i % ratios.size()] * rc_ref;
      const PhaseReport& p = grid[i];
      rows.push_back({fd(b), fd(1.0 / b), fd(rho), fd(p.rho_crit), to_string(p.phase), fd(p.y_infinity),
                      fd(p.normal_fugacity), fd(p.condensate_density), fd(p.residual)});
    }
    w_.write_csv("phase_diagram.csv",
                 {"beta", "T", "rho_bar", "rho_crit", "phase", "y_infinity", "normal_fugacity",
                  "condensate_density", "residual"},
                 rows);
    w_.begin("critical_temperature", {{"beta_lo", c_.sweep.beta_lo}, {"beta_hi", c_.sweep.beta_hi}});
    std::vector<CriticalTemperature> crit(ratios.size());
    parallel_for(ratios.size(), threads_, [&](std::size_t i) {
      crit[i] = critical_temperature(ratios[i] * rc_ref, disp_, c_.sweep.beta_lo, c_.sweep.beta_hi);
    });
    Rows crows;
    Json cjson = Json::array();
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      crows.push_back({fd(ratios[i] * rc_ref), fd(crit[i].beta_c), fd(crit[i].T_c), fd(crit[i].residual)});
      cjson.push_back({{"rho_bar", ratios[i] * rc_ref}, {"beta_c", crit[i].beta_c}, {"T_c", crit[i].T_c},
                       {"residual", crit[i].residual}});
    }
    w_.write_csv("critical_temperature.csv", {"rho_bar", "beta_c", "T_c", "residual"}, crows);
    Json out{{"reference_beta", c_.thermo.beta}, {"reference_rho_crit", rc_ref}, {"critical", cjson},
             {"points", grid.size()}};
    w_.write_json("phase_diagram.json", out);
    return out;
  }

  Json decouple_verify() {
    const CoupledSystem sys = make_coupled_system(c_);
    const auto& caps = c_.sweep.level_caps;
    const double tol_id = c_.tolerances.identity, tol_fac = c_.tolerances.factorization;
    const double floor = c_.tolerances.monotone_floor;

    w_.begin("verify_dressing_identity", {{"level_caps", caps}});
    const IdentityLadder id = verify_dressing_identity(sys, caps);
    Rows irows;
    std::vector<double> ires;
    for (const auto& p : id.points) {
      irows.push_back({std::to_string(p.level_cap), std::to_string(p.restricted_cap), fd(p.residual), fd(p.unitarity)});
      ires.push_back(p.residual);
    }
    w_.write_csv("identity_ladder.csv", {"n_max", "restricted_cap", "residual", "unitarity_defect"}, irows);
    const bool id_monotone = monotone_nonincreasing(ires, floor);
    const bool id_tol = !ires.empty() && ires.back() <= tol_id;

    w_.begin("verify_spectral_equivalence", {{"level_caps", caps}, {"levels", 5}});
    const SpectralLadder sp = verify_spectral_equivalence(sys, caps, 5);
    Rows srows;
    std::vector<double> sgaps;
    for (const auto& p : sp.points) {
      for (std::size_t l = 0; l < p.gaps.size(); ++l) {
        srows.push_back({std::to_string(p.level_cap), std::to_string(l), fd(p.coupled[l]), fd(p.decoupled[l]),
                         fd(p.gaps[l])});
      }
      sgaps.push_back(p.max_gap);
    }
    w_.write_csv("spectral_ladder.csv", {"n_max", "level", "coupled", "decoupled", "gap"}, srows);

    w_.begin("verify_factorization",
             {{"level_caps", caps}, {"cases", c_.bec.factorization_cases}, {"seed", c_.seed}});
    const auto cases = random_factorization_cases(sys, c_.bec.factorization_cases, c_.seed);
    const auto ladders = verify_factorization(sys, cases, caps);
    Rows frows;
    Json fjson = Json::array();
    bool fac_monotone = true, fac_tol = true;
    for (std::size_t i = 0; i < ladders.size(); ++i) {
      std::vector<double> g;
      for (const auto& p : ladders[i].points) {
        frows.push_back({std::to_string(i), std::to_string(p.level_cap), fd(p.lhs.real()), fd(p.lhs.imag()),
                         fd(p.rhs.real()), fd(p.rhs.imag()), fd(p.gap)});
        g.push_back(p.gap);
      }
      const bool mono = monotone_nonincreasing(g, floor);
      fac_monotone = fac_monotone && mono;
      fac_tol = fac_tol && !g.empty() && g.back() <= tol_fac;
      fjson.push_back({{"case", i}, {"gaps", g}, {"monotone", mono}});
    }
    w_.write_csv("factorization_ladder.csv", {"case", "n_max", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap"},
                 frows);

    w_.begin("gibbs_invariance_defect", {{"level_cap", caps.empty() ? 0 : caps.front()}, {"t", 0.7}});
    double invariance = 0.0;
    if (!caps.empty() && !cases.empty()) {
      const CoupledOperators ops = build_coupled_operators(sys, caps.front());
      const Eigen::Index nb = ops.H_full.rows() / cases.front().a_e.rows();
      const CMatrix x = kron(cases.front().a_e, CMatrix::Identity(nb, nb));
      invariance = gibbs_invariance_defect(ops.H_full, x, c_.thermo.beta, 0.7);
    }

    Json out{{"identity", {{"residuals", ires}, {"monotone", id_monotone}, {"within_tolerance", id_tol},
                           {"tolerance", tol_id}}},
             {"spectral", {{"max_gaps", sgaps}, {"monotone", monotone_nonincreasing(sgaps, floor)}}},
             {"factorization", {{"cases", fjson}, {"monotone", fac_monotone}, {"within_tolerance", fac_tol},
                                {"tolerance", tol_fac}}},
             {"gibbs_invariance_defect", invariance},
             {"hopping_is_diagonal", sys.hubbard.hopping.isDiagonal(0.0)},
             {"monotone_floor", floor}};
    w_.write_json("decouple.json", out);
    if (!id_monotone) fail("verify_dressing_identity: residual ladder is not monotone");
    if (!id_tol) fail("verify_dressing_identity: residual above tolerance at the largest n_max");
    if (!fac_monotone) fail("verify_factorization: gap ladder is not monotone");
    if (!fac_tol) fail("verify_factorization: gap above tolerance at the largest n_max");
    return out;
  }

  Json bec_states() {
    const double beta = c_.thermo.beta;
    w_.begin("make_bec_context", {{"beta", beta}});
    const BecContext ctx = make_bec_context(disp_, beta, resolve_density(c_, disp_, beta));
    const auto fns = make_test_functions(c_);
    const bool condensed = ctx.rho_0 > 0.0;

    w_.begin("characteristic_limits", {{"box_sizes", c_.sweep.box_sizes}, {"functions", fns.size()}});
    std::vector<LimitLadder> limits(fns.size());
    std::vector<DecompositionCheck> decomp(fns.size());
    std::vector<StationarityReport> stat(fns.size());
    const ChiRule rule = chi_rule();
    parallel_for(fns.size(), threads_, [&](std::size_t i) {
      limits[i] = characteristic_limits(fns[i], ctx, c_.sweep.box_sizes, c_.thermo.infrared_number);
      stat[i] = stationarity_check(fns[i], c_.bec.evolution_time, ctx);
      if (condensed) decomp[i] = decomposition_check(fns[i], ctx, rule);
    });
    Rows lrows;
    Json ljson = Json::array();
    bool ladders_ok = true;
    for (std::size_t i = 0; i < fns.size(); ++i) {
      for (const auto& p : limits[i].points) {
        lrows.push_back({std::to_string(i), fd(p.L), fd(p.s), fd(p.I1), fd(p.I2), fd(p.gap1), fd(p.gap2)});
      }
      // A gap already at roundoff level has nothing left to decrease.
      const bool g1 = limits[i].gap1_decreasing || limits[i].points.back().gap1 <= 1e-12;
      ladders_ok = ladders_ok && g1 && limits[i].gap2_decreasing;
      ljson.push_back({{"function", i}, {"regime", limits[i].regime}, {"q0_limit", limits[i].q0_limit},
                       {"I2_limit", limits[i].I2_limit}, {"gap1_decreasing", limits[i].gap1_decreasing},
                       {"gap2_decreasing", limits[i].gap2_decreasing}});
    }
    w_.write_csv("limits.csv", {"function", "L", "s", "I1", "I2", "gap1", "gap2"}, lrows);

    w_.begin("decomposition_check", {{"radial_nodes", 64}, {"angular_nodes", 256}});
    Rows drows;
    Json fjson = Json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < fns.size(); ++i) {
      const double pb = condensed ? psi_bec(fns[i], ctx)
                                  : psi_normal(fns[i], disp_, beta, ctx.phase.y_infinity);
      if (condensed) {
        drows.push_back({std::to_string(i), fd(pb), fd(decomp[i].mixture.real()), fd(decomp[i].mixture.imag()),
                         fd(decomp[i].gap)});
        worst = std::max(worst, decomp[i].gap);
      }
      fjson.push_back({{"function", i}, {"state_value", pb}, {"stationarity_gap", stat[i].gap},
                       {"zero_mode_drift", stat[i].zero_mode_drift}, {"q1_drift", stat[i].q1_drift}});
    }
    if (condensed) w_.write_csv("decomposition.csv", {"function", "psi_bec", "mixture_re", "mixture_im", "gap"}, drows);

    Json tp = Json::array();
    if (condensed && !fns.empty()) {
      w_.begin("two_point", {{"r_values", c_.bec.r_values}, {"theta_values", c_.bec.theta_values}});
      Rows trows;
      for (double r : c_.bec.r_values) {
        for (double th : c_.bec.theta_values) {
          const CondensatePhase ph = make_condensate_phase(ctx, r, th);
          const TwoPoint t = two_point(ph, fns.front(), fns.front(), disp_, beta);
          trows.push_back({fd(r), fd(ph.theta), fd(t.value.real()), fd(t.value.imag()),
                           fd(t.condensate_term.real()), fd(t.thermal_term.real()),
                           fd(fiber_density(ph, ctx.rho_crit))});
        }
      }
      w_.write_csv("two_point.csv",
                   {"r", "theta", "value_re", "value_im", "condensate_term", "thermal_term", "fiber_density"},
                   trows);
    }

    w_.begin("mean_fiber_density", {});
    const double mean_density = condensed ? mean_fiber_density(ctx, rule) : ctx.rho_bar;
    Json out{{"rho_bar", ctx.rho_bar},
             {"rho_crit", ctx.rho_crit},
             {"rho_0", ctx.rho_0},
             {"amplitude", ctx.amplitude},
             {"phase", to_string(ctx.phase.phase)},
             {"chi_total_mass", rule.total_mass()},
             {"mean_fiber_density", mean_density},
             {"decomposition_max_gap", worst},
             {"functions", fjson},
             {"limits", ljson},
             {"tolerances", {{"decomposition", c_.tolerances.decomposition}}}};
    w_.write_json("bec_states.json", out);
    if (!ladders_ok) fail("characteristic_limits: gap ladder is not decreasing");
    if (worst > c_.tolerances.decomposition) fail("decomposition_check: gap above tolerance");
    return out;
  }

  Json fingerprint() {
    const double beta = c_.thermo.beta;
    w_.begin("make_bec_context", {{"beta", beta}});
    const BecContext ctx = make_bec_context(disp_, beta, resolve_density(c_, disp_, beta));
    if (!(ctx.rho_0 > 0.0)) throw DomainError("fingerprint: the configured state is not condensed");
    w_.begin("fingerprint_recover", {{"r_values", c_.bec.r_values}, {"theta_values", c_.bec.theta_values}});
    const auto [f1, f2] = fingerprint_probes(ctx.amplitude, disp_.dim());
    Rows rows;
    double worst = 0.0;
    std::vector<std::pair<double, double>> atoms;
    for (double r : c_.bec.r_values) {
      for (double th : c_.bec.theta_values) {
        const CondensatePhase ph = make_condensate_phase(ctx, r, th);
        const Complex e1 = e_fingerprint(ph, f1), e2 = e_fingerprint(ph, f2);
        const FingerprintRecovery rec = fingerprint_recover(e1, e2);
        double err = std::abs(rec.r - r);
        if (rec.theta_determined) err = std::max(err, std::abs(std::remainder(rec.theta - ph.theta, 2 * M_PI)));
        worst = std::max(worst, err);
        rows.push_back({fd(r), fd(ph.theta), fd(e1.real()), fd(e1.imag()), fd(e2.real()), fd(e2.imag()),
                        fd(rec.r), fd(rec.theta), rec.theta_determined ? "1" : "0", fd(err)});
        if (r > 0.0) atoms.emplace_back(r, ph.theta);
      }
    }
    w_.write_csv("fingerprint.csv",
                 {"r", "theta", "e1_re", "e1_im", "e2_re", "e2_im", "r_recovered", "theta_recovered",
                  "theta_determined", "error"},
                 rows);

    w_.begin("gauge_shift_check", {{"shifts", {0.3, 1.7, 4.0}}});
    const auto fns = make_test_functions(c_);
    double gauge = 0.0;
    for (const auto& f : fns) {
      for (double r : c_.bec.r_values) {
        for (double th : c_.bec.theta_values) {
          for (double a : {0.3, 1.7, 4.0}) {
            gauge = std::max(gauge, gauge_shift_check(make_condensate_phase(ctx, r, th), f, a, disp_, beta));
          }
        }
      }
    }

    w_.begin("fingerprint_rank", {{"grid", "8x8 on [-1.75, 1.75]^2"}});
    std::vector<Complex> grid;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) grid.emplace_back(-1.75 + 0.5 * i, -1.75 + 0.5 * j);
    }
    const RankReport rank = fingerprint_rank(atoms, ctx.amplitude, grid);
    Json out{{"recovery_max_error", worst},
             {"gauge_max_defect", gauge},
             {"rank", rank.rank},
             {"columns", rank.columns},
             {"sigma_max", rank.sigma_max},
             {"sigma_min", rank.sigma_min},
             {"tolerances", {{"fingerprint", c_.tolerances.fingerprint}, {"gauge", c_.tolerances.gauge}}}};
    w_.write_json("fingerprint.json", out);
    if (worst > c_.tolerances.fingerprint) fail("fingerprint_recover: round trip above tolerance");
    if (gauge > c_.tolerances.gauge) fail("gauge_shift_check: defect above tolerance");
    if (rank.rank != rank.columns) fail("fingerprint_rank: fingerprint family is not injective");
    return out;
  }

  bool condensed() const {
    return make_bec_context(disp_, c_.thermo.beta, resolve_density(c_, disp_, c_.thermo.beta)).rho_0 > 0.0;
  }

  const std::vector<std::string>& failures() const { return failures_; }

 private:
  void fail(const std::string& what) {
    err_ << "verification failure: " << what << '\n';
    failures_.push_back(what);
  }

  const ExperimentConfig& c_;
  ArtifactWriter& w_;
  int threads_;
  std::ostream& err_;
  Dispersion disp_;
  std::vector<std::string> failures_;
};

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate",   "condense",    "phase-diagram", "decouple-verify",
                                              "bec-states", "fingerprint", "full-report"};
  return names;
}

int run(const RunOptions& options, std::ostream& err) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), options.command) == names.end()) {
    err << "config error: unknown command '" << options.command << "'\n";
    return kExitValidation;
  }
  ExperimentConfig config;
  try {
    config = load_config(options.config_path, options.overrides);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitValidation;
  }
  std::string dir = config.output_directory;
  if (!options.out_dir.empty()) dir = options.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) dir = env;

  std::unique_ptr<ArtifactWriter> writer;
  try {
    writer = std::make_unique<ArtifactWriter>(dir);
  } catch (const std::exception& e) {
    err << "config error: cannot create output directory '" << dir << "': " << e.what() << '\n';
    return kExitValidation;
  }

  int code = kExitSuccess;
  try {
    Session s(config, *writer, options.threads, err);
    Json summary{{"command", options.command}};
    summary["validate"] = s.validate();
    const std::string& cmd = options.command;
    const bool all = cmd == "full-report";
    if (all || cmd == "condense") summary["condense"] = s.condense();
    if (all || cmd == "phase-diagram") summary["phase_diagram"] = s.phase_diagram();
    if (all || cmd == "decouple-verify") summary["decouple"] = s.decouple_verify();
    if (all || cmd == "bec-states") summary["bec_states"] = s.bec_states();
    if (cmd == "fingerprint") summary["fingerprint"] = s.fingerprint();
    // The fingerprint needs a condensate; the full report skips it in the normal phase.
    if (all) summary["fingerprint"] = s.condensed() ? s.fingerprint() : Json("skipped: not condensed");
    summary["verification_failures"] = s.failures();
    if (!s.failures().empty()) code = kExitVerification;
    summary["exit_code"] = code;
    writer->begin("summary");
    writer->write_json("summary.json", summary);
  } catch (const NumericalError& e) {
    err << "numerical error in " << writer->current_operation() << ": " << e.what() << '\n';
    code = kExitNumerical;
  } catch (const DimensionCapExceeded& e) {
    err << "validation failure in " << writer->current_operation() << ": " << e.what() << '\n';
    code = kExitValidation;
  } catch (const std::exception& e) {
    err << "validation failure in " << writer->current_operation() << ": " << e.what() << '\n';
    code = kExitValidation;
  }
  writer->write_manifest(config, options.command, code);
  return code;
}

}  // namespace beclab
