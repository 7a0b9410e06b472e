#include "beclab/quadrature.hpp"

#include "beclab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace beclab::quad {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 times the squared first components of the eigenvectors.
Rule golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag, double mu0) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::VectorXd d(n), e(n > 0 ? n - 1 : 0);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) e(i) = offdiag[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    r.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    r.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return r;
}

void require_positive(int n, const char* what) {
  if (n < 1) throw DomainError(std::string(what) + ": rule needs at least one node");
}

}  // namespace

Rule gauss_legendre(int n) {
  require_positive(n, "gauss_legendre");
  std::vector<double> a(static_cast<std::size_t>(n), 0.0), b;
  for (int k = 1; k < n; ++k) b.push_back(k / std::sqrt(4.0 * k * k - 1.0));
  return golub_welsch(a, b, 2.0);
}

Rule gauss_laguerre(int n) {
  require_positive(n, "gauss_laguerre");
  std::vector<double> a, b;
  for (int k = 0; k < n; ++k) a.push_back(2.0 * k + 1.0);
  for (int k = 1; k < n; ++k) b.push_back(static_cast<double>(k));
  return golub_welsch(a, b, 1.0);
}

Rule gauss_hermite(int n) {
  require_positive(n, "gauss_hermite");
  std::vector<double> a(static_cast<std::size_t>(n), 0.0), b;
  for (int k = 1; k < n; ++k) b.push_back(std::sqrt(k / 2.0));
  return golub_welsch(a, b, std::sqrt(std::numbers::pi));
}

Rule periodic_trapezoid(int n) {
  require_positive(n, "periodic_trapezoid");
  Rule r;
  const double h = 2.0 * std::numbers::pi / n;
  for (int j = 0; j < n; ++j) {
    r.nodes.push_back(j * h);
    r.weights.push_back(h);
  }
  return r;
}

double sphere_area(int dim) {
  if (dim < 1) throw DomainError("sphere_area: dimension must be positive");
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

SphereRule sphere_rule(int dim, int n_polar, int n_azimuth) {
  SphereRule s;
  s.dim = dim;
  switch (dim) {
    case 1:
      s.directions = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
      s.weights = {1.0, 1.0};
      break;
    case 2: {
      const Rule phi = periodic_trapezoid(n_azimuth);
      for (std::size_t j = 0; j < phi.nodes.size(); ++j) {
        s.directions.push_back({std::cos(phi.nodes[j]), std::sin(phi.nodes[j]), 0.0});
        s.weights.push_back(phi.weights[j]);
      }
      break;
    }
    case 3: {
      const Rule ct = gauss_legendre(n_polar);
      const Rule phi = periodic_trapezoid(n_azimuth);
      for (std::size_t i = 0; i < ct.nodes.size(); ++i) {
        const double c = ct.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (std::size_t j = 0; j < phi.nodes.size(); ++j) {
          s.directions.push_back({st * std::cos(phi.nodes[j]), st * std::sin(phi.nodes[j]), c});
          s.weights.push_back(ct.weights[i] * phi.weights[j]);
        }
      }
      break;
    }
    default:
      throw DomainError("sphere_rule: only dimensions 1, 2, 3 are supported");
  }
  return s;
}

Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_depth) {
  Result r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, static_cast<unsigned>(max_depth), rel_tol, &r.error);
  return r;
}

Result integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
  Result r;
  if (a == b) return r;
  boost::math::quadrature::tanh_sinh<double> integrator;
  r.value = integrator.integrate(f, a, b, rel_tol, &r.error);
  return r;
}

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  Complex kronrod;
  double error;
};

Panel kronrod_panel(const std::function<Complex(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Complex k15 = kKronrodWeights[7] * f(c);
  Complex g7 = kGaussWeights[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const Complex s = f(c - h * kKronrodNodes[i]) + f(c + h * kKronrodNodes[i]);
    k15 += kKronrodWeights[i] * s;
    if (i % 2 == 1) g7 += kGaussWeights[i / 2] * s;
  }
  return {h * k15, std::abs(h * (k15 - g7))};
}

Complex adapt(const std::function<Complex(double)>& f, double a, double b, const Panel& whole,
              double abs_tol, int depth) {
  if (whole.error <= abs_tol || depth <= 0) return whole.kronrod;
  const double m = 0.5 * (a + b);
  const Panel left = kronrod_panel(f, a, m), right = kronrod_panel(f, m, b);
  return adapt(f, a, m, left, 0.5 * abs_tol, depth - 1) +
         adapt(f, m, b, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace

Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
  if (a == b) return {};
  constexpr int kStart = 8;
  std::array<Panel, kStart> panels;
  double scale = 0.0;
  const double h = (b - a) / kStart;
  for (int i = 0; i < kStart; ++i) {
    panels[i] = kronrod_panel(f, a + i * h, a + (i + 1) * h);
    scale += std::abs(panels[i].kronrod);
  }
  const double abs_tol = rel_tol * std::max(scale, std::numeric_limits<double>::min());
  Complex total{};
  for (int i = 0; i < kStart; ++i) {
    total += adapt(f, a + i * h, a + (i + 1) * h, panels[i], abs_tol / kStart, max_depth);
  }
  return total;
}

Complex spherical_integral(int dim, double k_lo, double k_hi,
                           const std::function<Complex(const std::array<double, 3>&)>& g,
                           const SphericalOptions& opts) {
  if (!(k_hi >= k_lo) || k_lo < 0.0) throw DomainError("spherical_integral: invalid radial range");
  const SphereRule sphere = sphere_rule(dim, opts.polar_nodes, opts.azimuth_nodes);
  auto radial = [&](double k) {
    Complex acc{};
    std::array<double, 3> point{};
    for (std::size_t i = 0; i < sphere.weights.size(); ++i) {
      for (int c = 0; c < 3; ++c) point[c] = k * sphere.directions[i][c];
      acc += sphere.weights[i] * g(point);
    }
    return acc * std::pow(k, dim - 1);
  };
  return integrate_complex(radial, k_lo, k_hi, opts.rel_tol);
}

}  // namespace beclab::quad
