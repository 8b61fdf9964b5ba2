#pragma once

// Pointwise constitutive laws and viscosity-matrix algebra. Nothing here
// knows about grids; all functions are pure.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "bifluid/grid.hpp"

namespace bifluid {

using Mat2 = std::array<std::array<double, 2>, 2>;
/// T[a][b]; unused rows/columns are zero in 2D.
using Tensor3 = std::array<Vec3, 3>;

using VectorFunction = std::function<Vec3(const Vec3&)>;
using ScalarFunction = std::function<double(const Vec3&)>;

struct MixtureParams {
  double gamma = 4.0;
  double m = 4.0;
  double a = 1.0;
  std::array<double, 2> masses{1.0, 1.0};
  std::array<VectorFunction, 2> forcing{[](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; },
                                        [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; }};
  ScalarFunction theta_hat = [](const Vec3&) { return 1.0; };
  bool allow_unproven = false;
};

struct ViscosityMatrices {
  Mat2 lambda{};  ///< bulk
  Mat2 mu{};      ///< shear

  /// nu_ij = lambda_ij + 2 mu_ij.
  Mat2 nu() const;
  /// 2 c0 = (mu11 + mu22) - sqrt((mu11 - mu22)^2 + (mu12 + mu21)^2).
  double c0() const;
  bool symmetric() const;
};

/// Smallest eigenvalue of (A + A^T) / 2.
double min_sym_eigenvalue(const Mat2& a);

/// m must exceed (2/3)(6 gamma^2 - 7 gamma + 3) / (2 gamma^2 - 5 gamma + 1).
double m_threshold(double gamma);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  bool waivable = false;  ///< only the gamma / m thresholds
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok = false;
  /// Checks that failed but were waived by allow_unproven.
  std::vector<std::string> warnings() const;
  std::vector<std::string> failures() const;
  const ValidationCheck* find(const std::string& name) const;
};

ValidationReport validate(const MixtureParams& params, const ViscosityMatrices& visc);

// ---------------------------------------------------------------------------
// Constitutive relations. Domain violations throw std::domain_error.

double pressure(double rho, double theta, double gamma);
double internal_energy(double rho, double theta, double gamma);
double total_energy(double rho, double speed_sq, double theta, double gamma);

struct ThermalCoefficients {
  double k;  ///< heat conductivity 1 + theta^m
  double L;  ///< boundary heat exchange 1 + theta^(m-1)
};
ThermalCoefficients thermal_coefficients(double theta, double m);

/// (-1)^i a (u1 - u2), i in {1, 2}.
Vec3 momentum_exchange(const Vec3& u1, const Vec3& u2, double a, int i);

Tensor3 strain_tensor(const Tensor3& grad_u);

/// Viscous stress of component i in {1, 2}; grad tensors use (grad u)_ab = d_a u_b.
Tensor3 viscous_stress(const Tensor3& grad_u1, const Tensor3& grad_u2, const ViscosityMatrices& visc, int i,
                       int dim = 3);

/// sum_i P^(i) : grad u^(i).
double entropy_production_density(const Tensor3& grad_u1, const Tensor3& grad_u2, const ViscosityMatrices& visc,
                                  int dim = 3);

/// Antiderivative of (1 + e^{m y})(eps + e^y) from 0 to z.
/// Throws std::overflow_error when (m + 1) z leaves the double range.
double kirchhoff_potential(double z, double eps, double m);

double contract(const Tensor3& a, const Tensor3& b);

struct ViscosityPreset {
  std::string name;
  ViscosityMatrices visc;
};
/// Five admissible matrix pairs with nu12 = 0, including a nonsymmetric one.
std::vector<ViscosityPreset> viscosity_presets();

}  // namespace bifluid
