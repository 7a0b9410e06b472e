#include "beclab/test_function.hpp"

#include "beclab/errors.hpp"
#include "beclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beclab {

double norm(const std::array<double, 3>& k, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += k[i] * k[i];
  return std::sqrt(s);
}

namespace {

double squared_distance(const std::array<double, 3>& k, const std::vector<double>& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += (k[i] - c[i]) * (k[i] - c[i]);
  return s;
}

Complex bump_value(const GaussianBump& b, const std::array<double, 3>& k) {
  return b.amplitude * std::exp(-squared_distance(k, b.center) / (2.0 * b.width * b.width));
}

// int conj(b1) b2 dk for two Gaussian bumps on the same component.
Complex bump_overlap(const GaussianBump& b1, const GaussianBump& b2, int dim) {
  const double s1 = b1.width * b1.width, s2 = b2.width * b2.width;
  double dist2 = 0.0;
  for (int i = 0; i < dim; ++i) dist2 += std::pow(b1.center[i] - b2.center[i], 2);
  const double reduced = s1 * s2 / (s1 + s2);
  return std::conj(b1.amplitude) * b2.amplitude *
         std::pow(2.0 * std::numbers::pi * reduced, 0.5 * dim) *
         std::exp(-dist2 / (2.0 * (s1 + s2)));
}

// e^{-z} times the integral of e^{z u_1} over the unit sphere S^{d-1}, z >= 0.
double scaled_sphere_exponential(int dim, double z) {
  switch (dim) {
    case 1:
      return 1.0 + std::exp(-2.0 * z);
    case 2: {
      if (z <= 30.0) return 2.0 * std::numbers::pi * std::cyl_bessel_i(0.0, z) * std::exp(-z);
      double term = 1.0, sum = 1.0;
      for (int k = 1; k < 20; ++k) {
        term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * z);
        sum += term;
        if (term < 1e-17 * sum) break;
      }
      return 2.0 * std::numbers::pi * sum / std::sqrt(2.0 * std::numbers::pi * z);
    }
    default:
      if (z < 1e-8) return 4.0 * std::numbers::pi * (1.0 - z);
      return 4.0 * std::numbers::pi * -std::expm1(-2.0 * z) / (2.0 * z);
  }
}

}  // namespace

TestFunction::TestFunction(int dim, std::vector<GaussianBump> bumps, int internal_components)
    : dim_(dim), internal_components_(internal_components), bumps_(std::move(bumps)) {
  if (dim < 1 || dim > 3) throw DomainError("test function: dimension must be 1, 2 or 3");
  if (internal_components < 1) throw DomainError("test function: N_i must be positive");
  for (const auto& b : bumps_) {
    if (static_cast<int>(b.center.size()) != dim) {
      throw DomainError("test function: bump center has wrong dimension");
    }
    if (!(b.width > 0.0)) throw DomainError("test function: bump width must be positive");
    if (b.component < 0 || b.component >= internal_components) {
      throw DomainError("test function: component index outside [0, N_i)");
    }
  }
}

TestFunction TestFunction::gaussian(std::vector<double> center, double width, Complex amplitude,
                                    int component, int internal_components) {
  const int dim = static_cast<int>(center.size());
  return TestFunction(dim, {GaussianBump{std::move(center), width, amplitude, component}},
                      internal_components);
}

bool TestFunction::is_zero() const {
  for (const auto& b : bumps_) {
    if (b.amplitude != Complex{}) return false;
  }
  return true;
}

Complex TestFunction::value(const std::array<double, 3>& k, int component) const {
  Complex v{};
  for (const auto& b : bumps_) {
    if (b.component == component) v += bump_value(b, k);
  }
  if (time_ != 0.0 && v != Complex{}) {
    v *= std::exp(Complex(0.0, time_ * dispersion_->omega(norm(k, dim_))));
  }
  return v;
}

double TestFunction::density(const std::array<double, 3>& k) const {
  double s = 0.0;
  for (int c = 0; c < internal_components_; ++c) s += std::norm(value(k, c));
  return s;
}

Complex TestFunction::cross_density(const TestFunction& g, const std::array<double, 3>& k) const {
  Complex s{};
  for (int c = 0; c < internal_components_; ++c) s += std::conj(g.value(k, c)) * value(k, c);
  return s;
}

std::vector<Complex> TestFunction::zero_mode() const {
  std::vector<Complex> z(static_cast<std::size_t>(internal_components_));
  if (time_ == 0.0) {
    for (const auto& b : bumps_) z[b.component] += b.amplitude * std::pow(b.width, dim_);
    return z;
  }
  // Tensor Gauss-Hermite around each bump centre for int e^{i t omega(|k|)} bump(k) dk.
  const quad::Rule gh = quad::gauss_hermite(48);
  const std::size_t n = gh.nodes.size();
  for (const auto& b : bumps_) {
    const double scale = std::sqrt(2.0) * b.width;
    Complex acc{};
    std::array<std::size_t, 3> idx{0, 0, 0};
    const std::size_t total = static_cast<std::size_t>(std::pow(n, dim_));
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      double w = 1.0;
      std::array<double, 3> k{0.0, 0.0, 0.0};
      for (int i = 0; i < dim_; ++i) {
        idx[i] = rem % n;
        rem /= n;
        k[i] = b.center[i] + scale * gh.nodes[idx[i]];
        w *= gh.weights[idx[i]];
      }
      acc += w * std::exp(Complex(0.0, time_ * dispersion_->omega(norm(k, dim_))));
    }
    z[b.component] += b.amplitude * std::pow(scale, dim_) * acc /
                      std::pow(2.0 * std::numbers::pi, 0.5 * dim_);
  }
  return z;
}

Complex TestFunction::zero_mode_scalar() const {
  int used = -1;
  for (const auto& b : bumps_) {
    if (used >= 0 && b.component != used) {
      throw DomainError("scalar zero mode requires a test function on a single component");
    }
    used = b.component;
  }
  if (used < 0) return {};
  return zero_mode()[used];
}

double TestFunction::zero_mode_norm_squared() const {
  double s = 0.0;
  for (const Complex& z : zero_mode()) s += std::norm(z);
  return s;
}

double TestFunction::norm_squared() const { return inner(*this).real(); }

Complex TestFunction::inner(const TestFunction& g) const {
  if (g.dim_ != dim_) throw DomainError("inner product of test functions of different dimension");
  if (g.time_ != time_) {
    throw DomainError("closed-form inner product needs equal evolution times");
  }
  Complex s{};
  for (const auto& a : bumps_) {
    for (const auto& b : g.bumps_) {
      if (a.component == b.component) s += bump_overlap(a, b, dim_);
    }
  }
  return s;
}

Complex TestFunction::shell_average(const TestFunction& g, double radius) const {
  if (g.dim_ != dim_) throw DomainError("shell average of test functions of different dimension");
  if (g.time_ != time_) throw DomainError("shell average needs equal evolution times");
  Complex s{};
  for (const auto& a : g.bumps_) {
    for (const auto& b : bumps_) {
      if (a.component != b.component) continue;
      const double pa = 0.5 / (a.width * a.width), pb = 0.5 / (b.width * b.width);
      const double p = pa + pb;
      double ca2 = 0.0, cb2 = 0.0, m2 = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double m = (pa * a.center[i] + pb * b.center[i]) / p;
        ca2 += a.center[i] * a.center[i];
        cb2 += b.center[i] * b.center[i];
        m2 += m * m;
      }
      const double m = std::sqrt(m2);
      const double log_c = -(pa * ca2 + pb * cb2) + p * m2;
      const double z = 2.0 * p * radius * m;
      s += std::conj(a.amplitude) * b.amplitude *
           std::exp(log_c - p * (radius - m) * (radius - m)) * scaled_sphere_exponential(dim_, z);
    }
  }
  return s;
}

std::vector<double> TestFunction::radial_breakpoints(const TestFunction& g) const {
  std::vector<double> pts{0.0};
  const double end = std::max(support_radius(), g.support_radius());
  for (const auto* f : {this, &g}) {
    for (const auto& b : f->bumps_) {
      double c = 0.0;
      for (double x : b.center) c += x * x;
      c = std::sqrt(c);
      for (double r : {c - 6.0 * b.width, c, c + 6.0 * b.width}) {
        if (r > 0.0 && r < end) pts.push_back(r);
      }
    }
  }
  pts.push_back(end);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
            pts.end());
  return pts;
}

double TestFunction::support_radius(double rel) const {
  double r = 0.0;
  const double reach = std::sqrt(2.0 * std::log(1.0 / rel));
  for (const auto& b : bumps_) {
    double c = 0.0;
    for (double x : b.center) c += x * x;
    r = std::max(r, std::sqrt(c) + reach * b.width);
  }
  return r;
}

TestFunction TestFunction::scaled(Complex s) const {
  TestFunction out = *this;
  for (auto& b : out.bumps_) b.amplitude *= s;
  return out;
}

TestFunction TestFunction::evolved(double t, const Dispersion& disp) const {
  if (disp.dim() != dim_) throw DomainError("evolved: dispersion dimension mismatch");
  TestFunction out = *this;
  if (dispersion_ && time_ != 0.0 && dispersion_->name() != disp.name()) {
    throw DomainError("evolved: cannot compose evolutions under different dispersions");
  }
  out.time_ = time_ + t;
  out.dispersion_ = std::make_shared<const Dispersion>(disp);
  return out;
}

}  // namespace beclab
