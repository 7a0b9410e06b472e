#pragma once

#include <functional>
#include <string>
#include <vector>

namespace beclab {

/// Radial phonon dispersion omega(k) = r(|k|) on R^d together with the boson
/// chemical potential and the number of internal components N_i.
class Dispersion {
 public:
  using Profile = std::function<double(double)>;

  struct Parameters {
    std::string name = "custom";
    int dim = 3;
    double growth_exponent = 4.0;  // d0
    double chemical_potential = 0.0;
    int internal_components = 1;
  };

  /// `gap` is F(k) = r(k) - r(0); if empty it is computed by subtraction.
  Dispersion(Profile radial, Profile derivative, Parameters params, Profile gap = {});

  double omega(double k) const { return radial_(k); }
  double derivative(double k) const { return derivative_(k); }
  double gap(double k) const;
  double omega0() const { return omega0_; }

  const std::string& name() const { return params_.name; }
  int dim() const { return params_.dim; }
  double growth_exponent() const { return params_.growth_exponent; }
  double chemical_potential() const { return params_.chemical_potential; }
  int internal_components() const { return params_.internal_components; }
  const Parameters& parameters() const { return params_; }

  /// y = exp(beta (omega0 - mu_b)).
  double fugacity(double beta) const;

  /// Local exponent p of F(k) ~ C k^p as k -> 0; +inf if F vanishes identically.
  double infrared_exponent() const;

  /// Smallest k with F(k) >= target, or +inf if F never reaches it below k_max.
  double radius_for_gap(double target, double k_max = 1e6) const;

  Dispersion with_internal_components(int n) const;
  Dispersion with_chemical_potential(double mu) const;

 private:
  Profile radial_;
  Profile derivative_;
  Profile gap_;
  Parameters params_;
  double omega0_;
};

/// r(k) = omega0 + c k^2.
Dispersion quadratic_dispersion(double omega0 = 1.0, double coefficient = 1.0,
                                Dispersion::Parameters params = {"quadratic"});

/// r(k) = sqrt(k^2 + m^2).
Dispersion relativistic_dispersion(double mass, Dispersion::Parameters params = {"relativistic"});

/// r(k) = omega0 + v k.
Dispersion linear_dispersion(double omega0, double speed, Dispersion::Parameters params = {"linear"});

/// Cubic Hermite interpolation of tabulated (k, r(k), r'(k)) samples with the
/// Fritsch-Carlson slope limiter; linear continuation with the last slope
/// beyond the table.
Dispersion tabulated_dispersion(std::vector<double> k, std::vector<double> r,
                                std::vector<double> dr, Dispersion::Parameters params = {"table"});

struct ConditionCheck {
  std::string name;
  bool passed = false;
  double witness = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;

  bool all_passed() const;
  const ConditionCheck& at(const std::string& name) const;
  std::vector<std::string> failures() const;
};

/// Evaluates every standing assumption on the dispersion at inverse temperature beta.
ValidationReport validate_dispersion(const Dispersion& disp, double beta);

}  // namespace beclab
