#include "beclab/phonon_gas.hpp"

#include "beclab/errors.hpp"
#include "beclab/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace beclab {

LatticeModes::LatticeModes(double box_size, const Dispersion& disp, double beta, double rel_cut)
    : box_size_(box_size), beta_(beta), disp_(disp) {
  if (!(box_size > 0.0)) throw DomainError("lattice modes: box size must be positive");
  if (!(beta > 0.0)) throw DomainError("lattice modes: beta must be positive");
  if (!(rel_cut > 0.0 && rel_cut < 1.0)) throw DomainError("lattice modes: rel_cut must be in (0, 1)");
  const int d = disp.dim();
  if (d < 1 || d > 3) throw DomainError("lattice modes: dimension must be 1, 2 or 3");
  spacing_ = 2.0 * std::numbers::pi / box_size;

  const double target = disp.gap(spacing_) + std::log(1.0 / rel_cut) / beta;
  const double k_cut = disp.radius_for_gap(target);
  if (!std::isfinite(k_cut)) {
    throw DomainError("lattice modes: dispersion gap never reaches the truncation level");
  }
  cutoff_norm2_ = static_cast<std::int64_t>(std::floor(std::pow(k_cut / spacing_, 2)));
  cutoff_norm2_ = std::max<std::int64_t>(cutoff_norm2_, 1);

  // Count one orthant and weight each point by its number of sign images.
  const auto n_cut = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(cutoff_norm2_))));
  std::vector<std::int64_t> count(static_cast<std::size_t>(cutoff_norm2_ + 1), 0);
  std::vector<std::int64_t> count_nz(count.size(), 0);
  const std::int64_t b_max = d >= 2 ? n_cut : 0, c_max = d >= 3 ? n_cut : 0;
  for (std::int64_t a = 0; a <= n_cut; ++a) {
    for (std::int64_t b = 0; b <= b_max; ++b) {
      const std::int64_t ab = a * a + b * b;
      if (ab > cutoff_norm2_) break;
      for (std::int64_t c = 0; c <= c_max; ++c) {
        const std::int64_t n2 = ab + c * c;
        if (n2 > cutoff_norm2_) break;
        int nonzero = (a != 0) + (b != 0) + (c != 0);
        const std::int64_t mult = std::int64_t{1} << nonzero;
        count[n2] += mult;
        if (nonzero == d) count_nz[n2] += mult;
      }
    }
  }
  for (std::int64_t n2 = 1; n2 <= cutoff_norm2_; ++n2) {
    if (count[n2] == 0) continue;
    ModeShell s;
    s.norm2 = n2;
    s.k = spacing_ * std::sqrt(static_cast<double>(n2));
    s.count = count[n2];
    s.count_all_nonzero = count_nz[n2];
    s.gap = disp.gap(s.k);
    s.boltzmann = std::exp(-beta * s.gap);
    shells_.push_back(s);
  }
}

double LatticeModes::volume() const { return std::pow(box_size_, dim()); }

std::int64_t LatticeModes::num_modes() const {
  std::int64_t n = 1;
  for (const auto& s : shells_) n += s.count;
  return n;
}

double LatticeModes::boltzmann_sum() const {
  double acc = 0.0;
  for (auto it = shells_.rbegin(); it != shells_.rend(); ++it) acc += it->count * it->boltzmann;
  return 1.0 + acc;
}

double LatticeModes::tail_bound() const {
  const int d = dim();
  const double k_lo = std::max(
      0.0, spacing_ * (std::sqrt(static_cast<double>(cutoff_norm2_)) - 0.5 * std::sqrt(static_cast<double>(d))));
  const auto res = quad::integrate(
      [&](double k) { return std::pow(k, d - 1) * std::exp(-beta_ * disp_.gap(k)); }, k_lo,
      std::numeric_limits<double>::infinity(), 1e-10);
  return std::pow(box_size_ / (2.0 * std::numbers::pi), d) * quad::sphere_area(d) * res.value;
}

void LatticeModes::for_each_mode_in_box(
    const std::array<double, 3>& center, const std::array<double, 3>& half_width,
    const std::function<void(const std::array<int, 3>&, const std::array<double, 3>&)>& fn) const {
  const int d = dim();
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  const auto n_cut = static_cast<int>(std::floor(std::sqrt(static_cast<double>(cutoff_norm2_))));
  for (int i = 0; i < d; ++i) {
    lo[i] = std::max(-n_cut, static_cast<int>(std::ceil((center[i] - half_width[i]) / spacing_)));
    hi[i] = std::min(n_cut, static_cast<int>(std::floor((center[i] + half_width[i]) / spacing_)));
    if (lo[i] > hi[i]) return;
  }
  std::array<int, 3> n{0, 0, 0};
  for (n[0] = lo[0]; n[0] <= hi[0]; ++n[0]) {
    for (n[1] = lo[1]; n[1] <= hi[1]; ++n[1]) {
      for (n[2] = lo[2]; n[2] <= hi[2]; ++n[2]) {
        const std::int64_t n2 = std::int64_t{n[0]} * n[0] + std::int64_t{n[1]} * n[1] +
                                std::int64_t{n[2]} * n[2];
        if (n2 == 0 || n2 > cutoff_norm2_) continue;
        fn(n, {spacing_ * n[0], spacing_ * n[1], spacing_ * n[2]});
      }
    }
  }
}

double bose_factor(double s, double x) { return 1.0 / std::expm1(std::log1p(s) + x); }

BosonNumber boson_number_finite(const LatticeModes& modes, double y, double n_ir) {
  if (!(y > 1.0)) throw DomainError("boson number: fugacity must exceed 1 (the k = 0 pole)");
  return boson_number_offset(modes, y - 1.0, n_ir);
}

BosonNumber boson_number_offset(const LatticeModes& modes, double s, double n_ir) {
  if (!(s > 0.0)) throw DomainError("boson number: fugacity must exceed 1 (the k = 0 pole)");
  if (!(n_ir >= 0.0)) throw DomainError("boson number: infrared number must be nonnegative");
  const double ni = modes.internal_components();
  const double beta = modes.beta();
  BosonNumber out;
  const auto& shells = modes.shells();
  for (auto it = shells.rbegin(); it != shells.rend(); ++it) {
    const double b = bose_factor(s, beta * it->gap);
    out.r_bL += ni * static_cast<double>(it->count_all_nonzero) * b;
    out.R_bL += ni * static_cast<double>(it->count - it->count_all_nonzero) * b;
  }
  out.N_b_0 = ni / s + n_ir;
  out.N_b_L_1 = out.r_bL + out.R_bL;
  out.N_b_L = out.N_b_0 + out.N_b_L_1;
  return out;
}

double bose_integral(const Dispersion& disp, double beta, double s, int dim) {
  if (!(beta > 0.0)) throw DomainError("bose integral: beta must be positive");
  if (!(s >= 0.0)) throw DomainError("bose integral: fugacity must be at least 1");
  if (dim < 1) throw DomainError("bose integral: dimension must be positive");
  if (s == 0.0) {
    const double p = disp.infrared_exponent();
    if (!(dim - p > 1e-9)) {
      throw InfraredDivergence("bose integral: int dk / (e^{beta F} - 1) diverges at y = 1 in d = " +
                               std::to_string(dim));
    }
  }
  double k_end = disp.radius_for_gap(60.0 / beta);
  if (!std::isfinite(k_end)) throw DomainError("bose integral: dispersion gap does not grow");
  if (k_end > 1.0) k_end = disp.radius_for_gap((60.0 + (dim - 1) * std::log(k_end)) / beta);
  const double k_split = std::min(0.25 * k_end, disp.radius_for_gap(1.0 / beta));
  auto integrand = [&](double k) {
    const double x = beta * disp.gap(k);
    // At s = 0 the pole sits exactly at F = 0; the integrable singularity has no mass there.
    if (s == 0.0 && x <= 0.0) return 0.0;
    const double v = std::pow(k, dim - 1) / std::expm1(std::log1p(s) + x);
    return std::isfinite(v) ? v : 0.0;
  };
  const double near = quad::integrate_singular(integrand, 0.0, k_split, 1e-14).value;
  const double far = quad::integrate(integrand, k_split, k_end, 1e-14).value;
  const double total = quad::sphere_area(dim) * (near + far);
  if (!std::isfinite(total)) throw InfraredDivergence("bose integral: quadrature is not finite");
  return total;
}

double rho_fr_offset(const Dispersion& disp, double beta, double s) {
  const int d = disp.dim();
  return disp.internal_components() * bose_integral(disp, beta, s, d) /
         std::pow(2.0 * std::numbers::pi, d);
}

double rho_fr(const Dispersion& disp, double beta, double y) {
  if (!(y >= 1.0)) throw DomainError("rho_fr: fugacity must be at least 1");
  return rho_fr_offset(disp, beta, y - 1.0);
}

double rho_crit(const Dispersion& disp, double beta) { return rho_fr_offset(disp, beta, 0.0); }

CharacteristicSplit finite_volume_characteristic(const LatticeModes& modes, const TestFunction& f,
                                                 double y_L) {
  if (!(y_L > 1.0)) throw DomainError("finite-volume characteristic: y_L must exceed 1");
  return finite_volume_characteristic_offset(modes, f, y_L - 1.0);
}

CharacteristicSplit finite_volume_characteristic_offset(const LatticeModes& modes,
                                                        const TestFunction& f, double s_L) {
  if (!(s_L > 0.0)) throw DomainError("finite-volume characteristic: y_L must exceed 1");
  if (f.dim() != modes.dim()) throw DomainError("finite-volume characteristic: dimension mismatch");
  const int d = modes.dim();
  const double cell = std::pow(modes.spacing(), d);
  CharacteristicSplit out;
  if (f.is_zero()) return out;
  out.I1 = cell * f.zero_mode_norm_squared() * (2.0 + s_L) / s_L;

  // Bounding box of the bumps, out to where |f|^2 drops below 1e-36 of its peak.
  const double reach = std::sqrt(2.0 * std::log(1e18));
  std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
  bool first = true;
  for (const auto& b : f.bumps()) {
    for (int i = 0; i < d; ++i) {
      const double a = b.center[i] - reach * b.width, z = b.center[i] + reach * b.width;
      lo[i] = first ? a : std::min(lo[i], a);
      hi[i] = first ? z : std::max(hi[i], z);
    }
    first = false;
  }
  std::array<double, 3> center{0, 0, 0}, half{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    center[i] = 0.5 * (lo[i] + hi[i]);
    half[i] = 0.5 * (hi[i] - lo[i]);
  }
  const double beta = modes.beta();
  const Dispersion& disp = modes.dispersion();
  double acc = 0.0;
  modes.for_each_mode_in_box(center, half, [&](const std::array<int, 3>&, const std::array<double, 3>& k) {
    const double x = beta * disp.gap(norm(k, d));
    acc += f.density(k) * (1.0 + 2.0 * bose_factor(s_L, x));
  });
  out.I2 = cell * acc;
  out.I_L = out.I1 + out.I2;
  out.weyl = std::exp(-0.25 * out.I_L);
  return out;
}

}  // namespace beclab
