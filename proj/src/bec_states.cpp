#include "beclab/bec_states.hpp"

#include "beclab/errors.hpp"
#include "beclab/quadrature.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace beclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

// coth(beta F / 2) = (1 + e^{-beta F}) / (1 - e^{-beta F}).
double thermal_kernel(const Dispersion& disp, double beta, double k) {
  return 1.0 / std::tanh(0.5 * beta * disp.gap(k));
}

void check_kernel_infrared(const TestFunction& f, const TestFunction& g, const Dispersion& disp,
                           const char* what) {
  if (!(disp.dim() - disp.infrared_exponent() <= 1e-9)) return;
  if (std::abs(f.shell_average(g, 0.0)) == 0.0) return;
  throw InfraredDivergence(std::string(what) +
                           ": test function does not vanish at k = 0 and the thermal kernel is not "
                           "integrable there");
}

bool strictly_decreasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

double condensate_amplitude(double rho_0, int dim, int internal_components) {
  if (internal_components < 1) throw DomainError("condensate amplitude: N_i must be positive");
  return 2.0 * std::pow(kTwoPi, dim) * rho_0 / internal_components;
}

BecContext make_bec_context(const Dispersion& disp, double beta, double rho_bar) {
  BecContext ctx{disp, beta, rho_bar, classify_phase(rho_bar, beta, disp)};
  ctx.rho_crit = ctx.phase.rho_crit;
  ctx.rho_0 = ctx.phase.phase == Phase::condensed ? ctx.phase.condensate_density : 0.0;
  ctx.amplitude = condensate_amplitude(ctx.rho_0, disp.dim(), disp.internal_components());
  return ctx;
}

CondensatePhase make_condensate_phase(double r, double theta, double rho_0, int dim,
                                      int internal_components) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("condensate phase: r must be >= 0");
  if (!(rho_0 > 0.0)) throw DomainError("condensate phase: condensate density must be positive");
  if (!std::isfinite(theta)) throw DomainError("condensate phase: theta must be finite");
  CondensatePhase p;
  p.r = r;
  p.theta = reduce_angle(theta);
  p.rho_0 = rho_0;
  p.internal_components = internal_components;
  p.dim = dim;
  p.c = condensate_amplitude(rho_0, dim, internal_components);
  return p;
}

CondensatePhase make_condensate_phase(const BecContext& ctx, double r, double theta) {
  return make_condensate_phase(r, theta, ctx.rho_0, ctx.dispersion.dim(),
                               ctx.dispersion.internal_components());
}

Complex radial_form(const TestFunction& f, const TestFunction& g,
                    const std::function<double(double)>& kernel) {
  if (f.is_zero() || g.is_zero()) return {};
  const int d = f.dim();
  const std::vector<double> bp = f.radial_breakpoints(g);
  double re = 0.0, im = 0.0;
  for (int part = 0; part < 2; ++part) {
    auto integrand = [&](double k) {
      const Complex s = f.shell_average(g, k);
      const double v = std::pow(k, d - 1) * kernel(k) * (part == 0 ? s.real() : s.imag());
      // An integrable kernel pole hit exactly (k^{d-1} K -> 0 * inf) carries no mass.
      return std::isfinite(v) ? v : 0.0;
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      acc += i == 0 ? quad::integrate_singular(integrand, bp[0], bp[1], 1e-13).value
                    : quad::integrate(integrand, bp[i], bp[i + 1], 1e-13).value;
    }
    (part == 0 ? re : im) = acc;
  }
  return {re, im};
}

double q0(const TestFunction& f, double c) { return c * f.zero_mode_norm_squared(); }

Complex q1_form(const TestFunction& f, const TestFunction& g, const Dispersion& disp, double beta) {
  if (!(beta > 0.0)) throw DomainError("q1: beta must be positive");
  check_kernel_infrared(f, g, disp, "q1");
  return radial_form(f, g, [&](double k) { return thermal_kernel(disp, beta, k); });
}

double q1(const TestFunction& f, const Dispersion& disp, double beta) {
  return q1_form(f, f, disp, beta).real();
}

double q2_offset(const TestFunction& f, const Dispersion& disp, double beta, double s) {
  if (!(s >= 0.0)) throw DomainError("q2: y_infinity must be at least 1");
  if (s == 0.0) return q1(f, disp, beta);
  return radial_form(f, f, [&](double k) {
           const double e = std::exp(-beta * disp.gap(k));
           return (1.0 + s + e) / (1.0 + s - e);
         }).real();
}

double q2(const TestFunction& f, const Dispersion& disp, double beta, double y_infinity) {
  return q2_offset(f, disp, beta, y_infinity - 1.0);
}

double psi_bec(const TestFunction& f, const BecContext& ctx) {
  return std::exp(-0.25 * (q0(f, ctx.amplitude) + q1(f, ctx.dispersion, ctx.beta)));
}

double psi_normal(const TestFunction& f, const Dispersion& disp, double beta, double y_infinity) {
  return std::exp(-0.25 * q2(f, disp, beta, y_infinity));
}

Complex e_fingerprint(const CondensatePhase& phase, const TestFunction& f) {
  const Complex z = f.zero_mode_scalar();
  const double w = (std::polar(1.0, phase.theta) * z).real();
  return std::polar(1.0, std::sqrt(phase.c * phase.r) * w);
}

Complex psi_fiber(const CondensatePhase& phase, const TestFunction& f, double q1_value) {
  return e_fingerprint(phase, f) * std::exp(-0.25 * q1_value);
}

Complex psi_fiber(const CondensatePhase& phase, const TestFunction& f, const Dispersion& disp,
                  double beta) {
  return psi_fiber(phase, f, q1(f, disp, beta));
}

double ChiRule::total_mass() const {
  double a = 0.0, b = 0.0;
  for (double w : r_weights) a += w;
  for (double w : theta_weights) b += w;
  return a * b;
}

ChiRule chi_rule(int radial_nodes, int angular_nodes) {
  const quad::Rule gl = quad::gauss_laguerre(radial_nodes);
  const quad::Rule tr = quad::periodic_trapezoid(angular_nodes);
  ChiRule rule;
  rule.r = gl.nodes;
  rule.r_weights = gl.weights;
  rule.theta = tr.nodes;
  for (double w : tr.weights) rule.theta_weights.push_back(w / kTwoPi);
  return rule;
}

Complex chi_average(const ChiRule& rule, const std::function<Complex(double, double)>& fn) {
  Complex acc{};
  for (std::size_t i = 0; i < rule.r.size(); ++i) {
    Complex inner{};
    for (std::size_t j = 0; j < rule.theta.size(); ++j) inner += rule.theta_weights[j] * fn(rule.r[i], rule.theta[j]);
    acc += rule.r_weights[i] * inner;
  }
  return acc;
}

DecompositionCheck decomposition_check(const TestFunction& f, const BecContext& ctx,
                                       const ChiRule& rule) {
  if (!(ctx.rho_0 > 0.0)) throw DomainError("decomposition: needs a condensed phase (rho_0 > 0)");
  const double q1v = q1(f, ctx.dispersion, ctx.beta);
  DecompositionCheck out;
  out.mixture = chi_average(rule, [&](double r, double theta) {
    return psi_fiber(make_condensate_phase(ctx, r, theta), f, q1v);
  });
  out.psi_bec = std::exp(-0.25 * (q0(f, ctx.amplitude) + q1v));
  out.gap = std::abs(out.mixture - out.psi_bec);
  return out;
}

TwoPoint two_point(const CondensatePhase& phase, const TestFunction& f, const TestFunction& g,
                   const Dispersion& disp, double beta) {
  TwoPoint tp;
  tp.condensate_term = 0.5 * phase.c * phase.r * f.zero_mode_scalar() * std::conj(g.zero_mode_scalar());
  check_kernel_infrared(f, g, disp, "two_point");
  tp.thermal_term = radial_form(f, g, [&](double k) { return bose_factor(0.0, beta * disp.gap(k)); });
  tp.q1_gf = q1_form(f, g, disp, beta);
  tp.inner_gf = g.inner(f);
  tp.value = tp.condensate_term + tp.thermal_term;
  return tp;
}

double fiber_density(const CondensatePhase& phase, double rho_crit) {
  return phase.internal_components * phase.c * phase.r / (2.0 * std::pow(kTwoPi, phase.dim)) + rho_crit;
}

double mean_fiber_density(const BecContext& ctx, const ChiRule& rule) {
  return chi_average(rule, [&](double r, double theta) {
           return Complex(fiber_density(make_condensate_phase(ctx, r, theta), ctx.rho_crit), 0.0);
         }).real();
}

double gauge_shift_check(const CondensatePhase& phase, const TestFunction& f, double a,
                         const Dispersion& disp, double beta) {
  const TestFunction rotated = f.scaled(std::polar(1.0, a));
  CondensatePhase shifted = phase;
  shifted.theta = reduce_angle(phase.theta + a);
  return std::abs(psi_fiber(phase, rotated, disp, beta) - psi_fiber(shifted, f, disp, beta));
}

std::pair<TestFunction, TestFunction> fingerprint_probes(double c, int dim, double width) {
  if (!(c > 0.0)) throw DomainError("fingerprint probes: c must be positive");
  const double amp = 1.0 / (std::sqrt(c) * std::pow(width, dim));
  const std::vector<double> origin(static_cast<std::size_t>(dim), 0.0);
  return {TestFunction::gaussian(origin, width, {amp, 0.0}),
          TestFunction::gaussian(origin, width, {0.0, amp})};
}

FingerprintRecovery fingerprint_recover(Complex e1, Complex e2) {
  const double u = std::arg(e1), v = -std::arg(e2);
  FingerprintRecovery out;
  out.r = u * u + v * v;
  out.theta_determined = out.r > 0.0;
  out.theta = out.theta_determined ? reduce_angle(std::atan2(v, u)) : 0.0;
  return out;
}

RankReport fingerprint_rank(std::span<const std::pair<double, double>> atoms, double c,
                            std::span<const Complex> grid) {
  CMatrix m(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const auto [r, theta] = atoms[j];
      m(i, j) = std::polar(1.0, std::sqrt(c * r) * (std::polar(1.0, theta) * grid[i]).real());
    }
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  RankReport out;
  out.columns = m.cols();
  if (s.size() == 0) return out;
  out.sigma_max = s(0);
  out.sigma_min = s(s.size() - 1);
  for (Eigen::Index i = 0; i < s.size(); ++i) out.rank += s(i) > 1e-10 * out.sigma_max;
  return out;
}

StationarityReport stationarity_check(const TestFunction& f, double t, const BecContext& ctx) {
  const TestFunction ft = f.evolved(t, ctx.dispersion);
  StationarityReport out;
  const double q1a = q1(f, ctx.dispersion, ctx.beta), q1b = q1(ft, ctx.dispersion, ctx.beta);
  out.q1_drift = std::abs(q1b - q1a);
  out.zero_mode_drift = std::sqrt(ft.zero_mode_norm_squared()) - std::sqrt(f.zero_mode_norm_squared());
  const double a = std::exp(-0.25 * (q0(f, ctx.amplitude) + q1a));
  const double b = std::exp(-0.25 * (q0(ft, ctx.amplitude) + q1b));
  out.gap = std::abs(b - a);
  return out;
}

LimitLadder characteristic_limits(const TestFunction& f, const BecContext& ctx,
                                  std::span<const double> box_sizes, double n_ir) {
  LimitLadder out;
  out.regime = to_string(ctx.phase.phase);
  if (ctx.phase.phase == Phase::normal) {
    out.q0_limit = 0.0;
    out.I2_limit = q2(f, ctx.dispersion, ctx.beta, ctx.phase.y_infinity);
  } else {
    out.q0_limit = q0(f, ctx.amplitude);
    out.I2_limit = q1(f, ctx.dispersion, ctx.beta);
  }
  std::vector<double> g1, g2;
  for (double L : box_sizes) {
    const LatticeModes modes(L, ctx.dispersion, ctx.beta);
    const FugacitySolution sol = solve_fugacity(modes, ctx.rho_bar, n_ir);
    const CharacteristicSplit cs = finite_volume_characteristic_offset(modes, f, sol.s);
    LimitPoint p{L, sol.s, cs.I1, cs.I2, std::abs(cs.I1 - out.q0_limit), std::abs(cs.I2 - out.I2_limit)};
    out.points.push_back(p);
    g1.push_back(p.gap1);
    g2.push_back(p.gap2);
  }
  out.gap1_decreasing = strictly_decreasing(g1);
  out.gap2_decreasing = strictly_decreasing(g2);
  return out;
}

CombinedLadder combined_limit(Complex electron_factor, const TestFunction& f, const BecContext& ctx,
                              std::span<const double> box_sizes, double n_ir) {
  CombinedLadder out;
  out.regime = to_string(ctx.phase.phase);
  const double boson = ctx.phase.phase == Phase::normal
                           ? psi_normal(f, ctx.dispersion, ctx.beta, ctx.phase.y_infinity)
                           : psi_bec(f, ctx);
  std::vector<double> gaps;
  for (double L : box_sizes) {
    const LatticeModes modes(L, ctx.dispersion, ctx.beta);
    const FugacitySolution sol = solve_fugacity(modes, ctx.rho_bar, n_ir);
    const CharacteristicSplit cs = finite_volume_characteristic_offset(modes, f, sol.s);
    CombinedPoint p;
    p.L = L;
    p.finite = electron_factor * cs.weyl;
    p.limit = electron_factor * boson;
    p.gap = std::abs(p.finite - p.limit);
    out.points.push_back(p);
    gaps.push_back(p.gap);
  }
  out.decreasing = strictly_decreasing(gaps);
  return out;
}

}  // namespace beclab
