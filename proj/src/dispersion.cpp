#include "beclab/dispersion.hpp"

#include "beclab/errors.hpp"
#include "beclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace beclab {

Dispersion::Dispersion(Profile radial, Profile derivative, Parameters params, Profile gap)
    : radial_(std::move(radial)),
      derivative_(std::move(derivative)),
      gap_(std::move(gap)),
      params_(std::move(params)) {
  if (!radial_ || !derivative_) throw DomainError("dispersion: radial profile and derivative required");
  if (params_.dim < 1) throw DomainError("dispersion: dimension must be positive");
  if (params_.internal_components < 1) {
    throw DomainError("dispersion: number of internal components must be positive");
  }
  omega0_ = radial_(0.0);
  if (!std::isfinite(omega0_) || omega0_ < 0.0) {
    throw DomainError("dispersion: r(0) must be finite and nonnegative");
  }
}

double Dispersion::gap(double k) const { return gap_ ? gap_(k) : radial_(k) - omega0_; }

double Dispersion::fugacity(double beta) const {
  return std::exp(beta * (omega0_ - params_.chemical_potential));
}

double Dispersion::infrared_exponent() const {
  const double k1 = 1e-4, k2 = 2e-4;
  const double f1 = gap(k1), f2 = gap(k2);
  if (!(f1 > 0.0) || !(f2 > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log(f2 / f1) / std::log(k2 / k1);
}

double Dispersion::radius_for_gap(double target, double k_max) const {
  if (gap(0.0) >= target) return 0.0;
  double hi = 1.0;
  while (gap(hi) < target) {
    hi *= 2.0;
    if (hi > k_max) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

Dispersion Dispersion::with_internal_components(int n) const {
  Parameters p = params_;
  p.internal_components = n;
  return Dispersion(radial_, derivative_, p, gap_);
}

Dispersion Dispersion::with_chemical_potential(double mu) const {
  Parameters p = params_;
  p.chemical_potential = mu;
  return Dispersion(radial_, derivative_, p, gap_);
}

Dispersion quadratic_dispersion(double omega0, double coefficient, Dispersion::Parameters params) {
  if (!(coefficient > 0.0)) throw DomainError("quadratic dispersion: coefficient must be positive");
  return Dispersion([=](double k) { return omega0 + coefficient * k * k; },
                    [=](double k) { return 2.0 * coefficient * k; }, std::move(params),
                    [=](double k) { return coefficient * k * k; });
}

Dispersion relativistic_dispersion(double mass, Dispersion::Parameters params) {
  if (!(mass >= 0.0)) throw DomainError("relativistic dispersion: mass must be nonnegative");
  return Dispersion([=](double k) { return std::hypot(k, mass); },
                    [=](double k) {
                      const double e = std::hypot(k, mass);
                      return e > 0.0 ? k / e : 1.0;
                    },
                    std::move(params),
                    [=](double k) { return k * k / (std::hypot(k, mass) + mass); });
}

Dispersion linear_dispersion(double omega0, double speed, Dispersion::Parameters params) {
  if (!(speed > 0.0)) throw DomainError("linear dispersion: speed must be positive");
  return Dispersion([=](double k) { return omega0 + speed * k; }, [=](double) { return speed; },
                    std::move(params), [=](double k) { return speed * k; });
}

namespace {

struct HermiteTable {
  std::vector<double> k, r, m;

  std::size_t interval(double x) const {
    auto it = std::upper_bound(k.begin(), k.end(), x);
    std::size_t i = static_cast<std::size_t>(it - k.begin());
    return std::clamp<std::size_t>(i, 1, k.size() - 1) - 1;
  }

  double value(double x) const {
    if (x >= k.back()) return r.back() + m.back() * (x - k.back());
    const std::size_t i = interval(x);
    const double h = k[i + 1] - k[i];
    const double t = (x - k[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * r[i] + (t3 - 2 * t2 + t) * h * m[i] +
           (-2 * t3 + 3 * t2) * r[i + 1] + (t3 - t2) * h * m[i + 1];
  }

  double slope(double x) const {
    if (x >= k.back()) return m.back();
    const std::size_t i = interval(x);
    const double h = k[i + 1] - k[i];
    const double t = (x - k[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * r[i] + (6 * t - 6 * t2) * r[i + 1]) / h +
           (3 * t2 - 4 * t + 1) * m[i] + (3 * t2 - 2 * t) * m[i + 1];
  }
};

}  // namespace

Dispersion tabulated_dispersion(std::vector<double> k, std::vector<double> r,
                                std::vector<double> dr, Dispersion::Parameters params) {
  if (k.size() < 2 || r.size() != k.size() || dr.size() != k.size()) {
    throw DomainError("tabulated dispersion: need >= 2 samples of equal length");
  }
  if (k.front() != 0.0) throw DomainError("tabulated dispersion: table must start at k = 0");
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (!(k[i] > k[i - 1])) throw DomainError("tabulated dispersion: k must be strictly increasing");
  }
  auto table = std::make_shared<HermiteTable>();
  table->k = std::move(k);
  table->r = std::move(r);
  table->m = std::move(dr);
  // Fritsch-Carlson limiter on intervals with a positive secant.
  for (std::size_t i = 0; i + 1 < table->k.size(); ++i) {
    const double delta = (table->r[i + 1] - table->r[i]) / (table->k[i + 1] - table->k[i]);
    if (!(delta > 0.0)) continue;
    const double a = table->m[i] / delta, b = table->m[i + 1] / delta;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      table->m[i] = tau * a * delta;
      table->m[i + 1] = tau * b * delta;
    }
  }
  const double r0 = table->r.front();
  return Dispersion([table](double x) { return table->value(x); },
                    [table](double x) { return table->slope(x); }, std::move(params),
                    [table, r0](double x) { return table->value(x) - r0; });
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ConditionCheck& ValidationReport::at(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw DomainError("validation report has no condition named " + name);
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

ValidationReport validate_dispersion(const Dispersion& disp, double beta) {
  if (!(beta > 0.0)) throw DomainError("validate_dispersion: beta must be positive");
  ValidationReport report;
  const int d = disp.dim();

  report.checks.push_back({"growth_exponent_exceeds_dimension", disp.growth_exponent() > d,
                           disp.growth_exponent() - d, "d0 - d"});

  // Sample grid on (0, K]: K is where beta F reaches 60, capped at 1e3.
  double k_end = disp.radius_for_gap(60.0 / beta, 1e3);
  if (!std::isfinite(k_end)) k_end = 1e3;
  k_end = std::max(k_end, 1.0);
  const int samples = 4000;
  std::vector<double> grid;
  grid.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    grid.push_back(1e-6 * std::pow(k_end / 1e-6, static_cast<double>(i) / (samples - 1)));
  }

  double min_slope = std::numeric_limits<double>::infinity();
  for (double k : grid) min_slope = std::min(min_slope, disp.derivative(k));
  report.checks.push_back({"profile_strictly_increasing", min_slope > 0.0, min_slope,
                           "min r'(k) over the sampled grid (k > 0)"});

  const double far_gap = disp.gap(k_end);
  report.checks.push_back({"profile_unbounded", beta * far_gap >= 60.0, far_gap,
                           "F(k) at the end of the sample grid"});

  // log of (1+k)^{d0} exp(-beta r(k)); bounded iff eventually decreasing.
  auto log_weight = [&](double k) {
    return disp.growth_exponent() * std::log1p(k) - beta * disp.omega(k);
  };
  double log_sup = log_weight(0.0);
  for (double k : grid) log_sup = std::max(log_sup, log_weight(k));
  const double tail_a = log_weight(k_end), tail_b = log_weight(2.0 * k_end),
               tail_c = log_weight(4.0 * k_end);
  const bool decaying = tail_b < tail_a && tail_c < tail_b && tail_c < log_sup - 20.0;
  report.checks.push_back({"growth_bound_finite", decaying, std::exp(log_sup),
                           "sup_k (1+k)^{d0} exp(-beta r(k)) on the grid; tail must decay"});

  // int_{|k|<=1} dk / F(k): finite iff F ~ k^p with p < d.
  const double p = disp.infrared_exponent();
  ConditionCheck ir{"infrared_integrable", false, std::numeric_limits<double>::infinity(),
                    "int_{|k|<=1} dk/(omega(k)-omega0)"};
  if (std::isfinite(p) && d - p > 1e-3) {
    const auto res = quad::integrate_singular(
        [&](double k) {
          const double v = std::pow(k, d - 1) / disp.gap(k);
          return std::isfinite(v) ? v : 0.0;
        },
        0.0, 1.0, 1e-10);
    ir.witness = quad::sphere_area(d) * res.value;
    ir.passed = std::isfinite(ir.witness);
  } else {
    ir.detail += " (local exponent of F at 0 is " + std::to_string(p) + ")";
  }
  report.checks.push_back(ir);

  const double margin = disp.omega0() - disp.chemical_potential();
  report.checks.push_back({"gap_above_chemical_potential", margin > 0.0, margin, "omega0 - mu_b"});
  const double y = disp.fugacity(beta);
  report.checks.push_back({"fugacity_above_one", y > 1.0, y, "exp(beta (omega0 - mu_b))"});
  return report;
}

}  // namespace beclab
