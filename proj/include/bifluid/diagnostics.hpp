#pragma once

// Read-only passes over a state: the a priori norm bundle, weak-form and
// integral-identity residuals, effective viscous fluxes and renormalized
// integrals. Nothing here throws on large or diverging values.

#include <array>
#include <string>
#include <vector>

#include "bifluid/fixed_point.hpp"

namespace bifluid {

struct MonitorRow {
  double eps = 0.0;
  std::array<double, 2> rho_L2gamma{};
  std::array<double, 2> u_W12{};
  std::array<double, 2> eps_grad_rho{};  ///< in L_{6 gamma / (gamma + 3)}
  double theta_L3m = 0.0;
  double grad_theta_L2 = 0.0;
  double boundary_exp_s = 0.0;  ///< boundary integral of e^s + e^-s
  double grad_s_L2 = 0.0;
  double theta_boundary_L2m = 0.0;
  double weak_H1 = 0.0;
  double weak_H2 = 0.0;
  double weak_H3 = 0.0;
  double energy_identity = 0.0;
  double entropy_identity = 0.0;
  double kirchhoff_residual = 0.0;
  std::array<double, 2> renorm{};
  int fp_iterations = 0;
  bool converged = true;
};

/// Column names in serialization order: eps, the norm bundle, residuals,
/// renormalized integrals, iteration count, convergence flag.
const std::vector<std::string>& monitor_columns();
/// Values in the order of monitor_columns().
std::vector<double> monitor_values(const MonitorRow& row);

struct TestFunction {
  double value = 0.0;
  Vec3 grad{};
};

enum class TestFamilyKind { SmoothBumpInterior, PolynomialGlobal };

/// Scalar test functions sampled at arbitrary points.
class TestFunctionFamily {
 public:
  /// Bumps: 3 positions per axis times 2 widths, compactly supported in the
  /// box. Polynomials: tensor products of (x_a / L_a)^k, k <= degree.
  TestFunctionFamily(TestFamilyKind kind, const Grid& g, int degree = 3);
  TestFamilyKind kind() const { return kind_; }
  std::size_t size() const { return count_; }
  TestFunction eval(std::size_t n, const Vec3& x) const;
  /// Cell-center samples of member n.
  Field sample(std::size_t n) const;

 private:
  TestFamilyKind kind_;
  Grid grid_;
  int degree_;
  std::size_t count_ = 0;
};

/// Norm bundle of the a priori estimate; boundary values use the lam-problem
/// trace of s (falling back to cell values if the trace cannot be formed).
MonitorRow estimate_monitor(const MixtureState& state, const Problem& pb);

/// estimate_monitor plus every residual and renormalized integral.
MonitorRow full_monitor(const MixtureState& state, const Problem& pb, int fp_iterations, bool converged);

struct WeakResiduals {
  double h1 = 0.0, h2 = 0.0, h3 = 0.0;
};

/// Max over test functions of |sum of integrals| / (sum of |integrands|).
/// H1 and H3 use the polynomial family; H2 uses the bump family on every
/// velocity component. Discrete gradients of the test functions are used
/// where the state's discrete operators would pair with them.
WeakResiduals weak_residuals(const MixtureState& state, const Problem& pb);

struct IdentityResiduals {
  double energy_identity = 0.0;
  double entropy_identity = 0.0;
  double kirchhoff_residual = 0.0;
};

/// Termwise quadrature of the two energy identities and the discrete
/// Kirchhoff-form residual; each normalized by the summed term magnitudes.
IdentityResiduals identity_residuals(const MixtureState& state, const Problem& pb);

/// Left and right sides of the second identity, term by term, for tests.
struct IdentityTerms {
  std::vector<std::pair<std::string, double>> lhs, rhs;
  double residual() const;
};
IdentityTerms energy_identity_terms(const MixtureState& state, const Problem& pb);
IdentityTerms entropy_identity_terms(const MixtureState& state, const Problem& pb);

/// F_i = rho_i^gamma + rho_i theta - sum_j nu_ij div u^(j). Zero entries of nu
/// are skipped, so F_1 never touches u^(2) under triangularity.
Field effective_viscous_flux(const MixtureState& state, const ViscosityMatrices& visc, double gamma, int i);

/// L2 norm of a - b over cells at least `layers` cells away from the boundary.
double interior_l2_difference(const Field& a, const Field& b, int layers = 2);

/// Integral of rho_i div u^(i).
double renormalized_integral(const MixtureState& state, int i);

/// Smallest cellwise value of sum_i P^(i) : grad u^(i).
double min_entropy_production(const MixtureState& state, const ViscosityMatrices& visc);

}  // namespace bifluid
