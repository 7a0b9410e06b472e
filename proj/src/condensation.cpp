#include "beclab/condensation.hpp"

#include "beclab/errors.hpp"

#include <cmath>
#include <limits>
#include <tuple>

namespace beclab {

namespace {

bool same_sign(double a, double b) { return (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0); }

}  // namespace

RootResult bracketed_root(const std::function<double(double)>& g, double lo, double hi, double f_tol,
                          double x_tol, bool log_scale) {
  if (!(hi > lo)) throw BracketError("root: empty bracket");
  if (log_scale && !(lo > 0.0)) throw BracketError("root: geometric bisection needs lo > 0");
  RootResult best;
  double flo = g(lo), fhi = g(hi);
  best.evaluations = 2;
  auto consider = [&](double x, double fx) {
    if (std::abs(fx) < best.residual) {
      best.x = x;
      best.residual = std::abs(fx);
    }
  };
  best.x = std::abs(flo) < std::abs(fhi) ? lo : hi;
  best.residual = std::min(std::abs(flo), std::abs(fhi));
  if (flo == 0.0 || fhi == 0.0) return best;
  if (same_sign(flo, fhi)) throw BracketError("root: no sign change on the bracket");

  auto width_ok = [&](double rel) {
    return log_scale ? hi / lo <= 1.0 + rel : hi - lo <= rel * std::max(1.0, std::abs(hi));
  };
  while (!width_ok(1e-6) && best.evaluations < 4000) {
    const double mid = log_scale ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
    const double fm = g(mid);
    ++best.evaluations;
    consider(mid, fm);
    if (fm == 0.0 || best.residual <= f_tol) return best;
    if (same_sign(fm, flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  int retained = 0;  // which end survived the last step: -1 lo, +1 hi
  for (int it = 0; it < 200; ++it) {
    if (best.residual <= f_tol) break;
    if (hi - lo <= x_tol * std::max(std::abs(lo), std::abs(hi))) break;
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = g(x);
    ++best.evaluations;
    consider(x, fx);
    if (fx == 0.0) break;
    if (same_sign(fx, flo)) {
      lo = x;
      flo = fx;
      if (retained == 1) fhi *= 0.5;
      retained = 1;
    } else {
      hi = x;
      fhi = fx;
      if (retained == -1) flo *= 0.5;
      retained = -1;
    }
  }
  return best;
}

double lattice_density(const LatticeModes& modes, double s, double n_ir) {
  return boson_number_offset(modes, s, n_ir).N_b_L / modes.volume();
}

double fugacity_bracket_bound(const LatticeModes& modes, double rho_bar, double n_ir) {
  const double rho_ir = n_ir / modes.volume();
  if (!(rho_bar > rho_ir)) {
    throw UnsolvableDensity("fugacity: target density must exceed the infrared density");
  }
  return modes.internal_components() / ((rho_bar - rho_ir) * modes.volume()) *
         (1.0 + modes.boltzmann_sum());
}

double lattice_lipschitz_constant(const LatticeModes& modes, double a) {
  if (!(a > 0.0)) throw DomainError("lipschitz constant: a must be positive");
  return modes.internal_components() / modes.volume() / (a * a) * modes.boltzmann_sum();
}

FugacitySolution solve_fugacity(const LatticeModes& modes, double rho_bar, double n_ir) {
  FugacitySolution sol;
  sol.L = modes.box_size();
  sol.target_density = rho_bar;
  sol.infrared_density = n_ir / modes.volume();
  sol.bracket_bound = fugacity_bracket_bound(modes, rho_bar, n_ir);
  auto g = [&](double s) { return lattice_density(modes, s, n_ir) - rho_bar; };
  double lo = 1e-14;
  while (g(lo) <= 0.0) {
    lo *= 1e-3;
    if (lo < 1e-300) throw UnsolvableDensity("fugacity: root lies below the representable range");
  }
  const double hi = sol.bracket_bound + 1.0;
  const RootResult r = bracketed_root(g, lo, hi, 1e-13 * std::max(1.0, rho_bar), 1e-15, true);
  sol.s = r.x;
  sol.y = 1.0 + r.x;
  sol.residual = r.residual;
  return sol;
}

FugacitySolution solve_fugacity(double L, double rho_bar, double beta, const Dispersion& disp,
                                double n_ir) {
  return solve_fugacity(LatticeModes(L, disp, beta), rho_bar, n_ir);
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::condensed:
      return "condensed";
    case Phase::normal:
      return "normal";
    case Phase::critical:
      return "critical";
  }
  return "unknown";
}

PhaseReport classify_phase(double rho_bar, double beta, const Dispersion& disp, double critical_tol) {
  if (!(rho_bar > 0.0)) throw DomainError("classify_phase: density must be positive");
  PhaseReport rep;
  rep.rho_crit = rho_crit(disp, beta);
  if (std::abs(rho_bar - rep.rho_crit) <= critical_tol) {
    rep.phase = Phase::critical;
    return rep;
  }
  if (rho_bar > rep.rho_crit) {
    rep.phase = Phase::condensed;
    rep.condensate_density = rho_bar - rep.rho_crit;
    return rep;
  }
  rep.phase = Phase::normal;
  auto g = [&](double s) { return rho_fr_offset(disp, beta, s) - rho_bar; };
  double hi = 1.0;
  while (g(hi) > 0.0) hi *= 2.0;
  double lo = 1e-12;
  if (g(lo) <= 0.0) {
    rep.normal_fugacity = rep.y_infinity = 1.0 + lo;
    rep.residual = std::abs(g(lo));
    return rep;
  }
  const RootResult r = bracketed_root(g, lo, hi, 1e-14 * std::max(1.0, rho_bar), 1e-15, true);
  rep.normal_fugacity = rep.y_infinity = 1.0 + r.x;
  rep.residual = r.residual;
  return rep;
}

std::pair<double, double> fit_inverse_length(const std::vector<double>& L, const std::vector<double>& v) {
  if (L.size() != v.size() || L.size() < 2) {
    throw DomainError("fit_inverse_length: need at least two matching points");
  }
  const double n = static_cast<double>(L.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double x = 1.0 / L[i];
    sx += x;
    sy += v[i];
    sxx += x * x;
    sxy += x * v[i];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {(sy - b * sx) / n, b};
}

CondensateSequence condensate_sequence(const std::vector<double>& box_sizes, double rho_bar,
                                       double beta, const Dispersion& disp, double n_ir) {
  if (box_sizes.empty()) throw DomainError("condensate_sequence: need at least one box size");
  for (std::size_t i = 1; i < box_sizes.size(); ++i) {
    if (!(box_sizes[i] > box_sizes[i - 1])) {
      throw DomainError("condensate_sequence: box sizes must be strictly increasing");
    }
  }
  CondensateSequence seq;
  seq.phase = classify_phase(rho_bar, beta, disp);
  std::vector<double> ls, vs;
  for (double L : box_sizes) {
    const LatticeModes modes(L, disp, beta);
    const FugacitySolution sol = solve_fugacity(modes, rho_bar, n_ir);
    const BosonNumber nb = boson_number_offset(modes, sol.s, n_ir);
    seq.points.push_back({L, sol.y, sol.s, sol.residual, nb.N_b_0 / modes.volume()});
    ls.push_back(L);
    vs.push_back(seq.points.back().N_b0_over_Ld);
  }
  if (ls.size() >= 2) {
    const std::size_t k = std::min<std::size_t>(3, ls.size());
    const std::vector<double> tl(ls.end() - static_cast<long>(k), ls.end());
    const std::vector<double> tv(vs.end() - static_cast<long>(k), vs.end());
    std::tie(seq.extrapolated_limit, seq.slope) = fit_inverse_length(tl, tv);
  } else {
    seq.extrapolated_limit = vs.back();
  }
  return seq;
}

CriticalTemperature critical_temperature(double rho_bar, const Dispersion& disp, double beta_lo,
                                         double beta_hi) {
  if (!(beta_lo > 0.0 && beta_hi > beta_lo)) {
    throw DomainError("critical_temperature: need 0 < beta_lo < beta_hi");
  }
  constexpr int samples = 9;
  std::vector<double> rc;
  for (int i = 0; i < samples; ++i) {
    const double b = beta_lo * std::pow(beta_hi / beta_lo, static_cast<double>(i) / (samples - 1));
    rc.push_back(rho_crit(disp, b));
  }
  bool inc = true, dec = true;
  for (int i = 1; i < samples; ++i) {
    inc = inc && rc[i] > rc[i - 1];
    dec = dec && rc[i] < rc[i - 1];
  }
  if (!inc && !dec) throw DomainError("critical_temperature: rho_crit is not monotone on the interval");
  auto g = [&](double b) { return rho_crit(disp, b) - rho_bar; };
  const RootResult r = bracketed_root(g, beta_lo, beta_hi, 1e-15 * rho_bar, 1e-15, true);
  return {r.x, 1.0 / r.x, r.residual};
}

}  // namespace beclab
