#include "bifluid/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bifluid {

Mat2 ViscosityMatrices::nu() const {
  Mat2 n{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) n[i][j] = lambda[i][j] + 2.0 * mu[i][j];
  return n;
}

double ViscosityMatrices::c0() const {
  const double d = mu[0][0] - mu[1][1];
  const double o = mu[0][1] + mu[1][0];
  return 0.5 * ((mu[0][0] + mu[1][1]) - std::sqrt(d * d + o * o));
}

bool ViscosityMatrices::symmetric() const { return lambda[0][1] == lambda[1][0] && mu[0][1] == mu[1][0]; }

double min_sym_eigenvalue(const Mat2& a) {
  const double p = a[0][0], q = a[1][1], o = 0.5 * (a[0][1] + a[1][0]);
  return 0.5 * (p + q) - std::sqrt(0.25 * (p - q) * (p - q) + o * o);
}

double m_threshold(double gamma) {
  return (2.0 / 3.0) * (6.0 * gamma * gamma - 7.0 * gamma + 3.0) / (2.0 * gamma * gamma - 5.0 * gamma + 1.0);
}

std::vector<std::string> ValidationReport::warnings() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed && c.waivable) out.push_back(c.name + ": " + c.detail);
  return out;
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed && !c.waivable) out.push_back(c.name + ": " + c.detail);
  return out;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

ValidationReport validate(const MixtureParams& params, const ViscosityMatrices& visc) {
  ValidationReport r;
  auto add = [&](std::string name, bool passed, bool waivable, std::string detail) {
    r.checks.push_back({std::move(name), passed, waivable, std::move(detail)});
  };

  const double g = params.gamma;
  add("gamma range", g > 1.0, false, "gamma = " + fmt(g) + ", needs > 1");
  add("m range", params.m > 0.0, false, "m = " + fmt(params.m) + ", needs > 0");
  add("friction", params.a > 0.0, false, "a = " + fmt(params.a) + ", needs > 0");
  add("masses", params.masses[0] > 0.0 && params.masses[1] > 0.0, false,
      "M = (" + fmt(params.masses[0]) + ", " + fmt(params.masses[1]) + "), both need > 0");

  add("gamma threshold", g > 3.0, true, "gamma = " + fmt(g) + ", needs > 3");
  const double mt = 2.0 * g * g - 5.0 * g + 1.0 > 0.0 ? m_threshold(g) : std::numeric_limits<double>::infinity();
  add("m threshold", params.m > mt, true, "m = " + fmt(params.m) + ", needs > " + fmt(mt));

  const double scale = std::max({std::abs(visc.mu[0][0]), std::abs(visc.mu[1][1]), std::abs(visc.lambda[0][0]),
                                 std::abs(visc.lambda[1][1]), 1.0});
  const double eig_m = min_sym_eigenvalue(visc.mu);
  add("shear matrix definite", eig_m > 0.0, false, "smallest eigenvalue of sym(M) = " + fmt(eig_m));
  Mat2 comb{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) comb[i][j] = 3.0 * visc.lambda[i][j] + 2.0 * visc.mu[i][j];
  const double eig_c = min_sym_eigenvalue(comb);
  add("bulk combination semidefinite", eig_c >= -1e-12 * scale, false,
      "smallest eigenvalue of sym(3 Lambda + 2 M) = " + fmt(eig_c));
  const double nu12 = visc.nu()[0][1];
  add("triangularity", std::abs(nu12) <= 1e-12 * scale, false,
      "nu12 = lambda12 + 2 mu12 = " + fmt(nu12) + ", needs 0");
  const double c0 = visc.c0();
  add("coercivity", c0 > 0.0, false, "c0 = " + fmt(c0));

  r.ok = true;
  for (const auto& c : r.checks)
    if (!c.passed && !(c.waivable && params.allow_unproven)) r.ok = false;
  return r;
}

// ---------------------------------------------------------------------------

double pressure(double rho, double theta, double gamma) {
  if (rho < 0.0) throw std::domain_error("pressure: negative density");
  if (!(theta > 0.0)) throw std::domain_error("pressure: nonpositive temperature");
  return std::pow(rho, gamma) + rho * theta;
}

double internal_energy(double rho, double theta, double gamma) {
  if (!(gamma > 1.0)) throw std::domain_error("internal energy: gamma must exceed 1");
  if (rho < 0.0) throw std::domain_error("internal energy: negative density");
  if (theta < 0.0) throw std::domain_error("internal energy: negative temperature");
  return std::pow(rho, gamma - 1.0) / (gamma - 1.0) + theta;
}

double total_energy(double rho, double speed_sq, double theta, double gamma) {
  return 0.5 * speed_sq + internal_energy(rho, theta, gamma);
}

ThermalCoefficients thermal_coefficients(double theta, double m) {
  if (!(theta > 0.0)) throw std::domain_error("thermal coefficients: nonpositive temperature");
  return {1.0 + std::pow(theta, m), 1.0 + std::pow(theta, m - 1.0)};
}

Vec3 momentum_exchange(const Vec3& u1, const Vec3& u2, double a, int i) {
  const double s = (i == 1 ? -1.0 : 1.0) * a;
  return {s * (u1[0] - u2[0]), s * (u1[1] - u2[1]), s * (u1[2] - u2[2])};
}

Tensor3 strain_tensor(const Tensor3& g) {
  Tensor3 d{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) d[a][b] = 0.5 * (g[a][b] + g[b][a]);
  return d;
}

Tensor3 viscous_stress(const Tensor3& g1, const Tensor3& g2, const ViscosityMatrices& visc, int i, int dim) {
  const int r = i - 1;
  Tensor3 p{};
  const Tensor3* grads[2] = {&g1, &g2};
  for (int j = 0; j < 2; ++j) {
    const Tensor3& g = *grads[j];
    double div = 0.0;
    for (int a = 0; a < dim; ++a) div += g[a][a];
    const Tensor3 d = strain_tensor(g);
    for (int a = 0; a < dim; ++a) {
      p[a][a] += visc.lambda[r][j] * div;
      for (int b = 0; b < dim; ++b) p[a][b] += 2.0 * visc.mu[r][j] * d[a][b];
    }
  }
  return p;
}

double contract(const Tensor3& a, const Tensor3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a[i][j] * b[i][j];
  return s;
}

double entropy_production_density(const Tensor3& g1, const Tensor3& g2, const ViscosityMatrices& visc, int dim) {
  return contract(viscous_stress(g1, g2, visc, 1, dim), g1) + contract(viscous_stress(g1, g2, visc, 2, dim), g2);
}

double kirchhoff_potential(double z, double eps, double m) {
  constexpr double kMaxExponent = 709.0;
  if ((m + 1.0) * z > kMaxExponent) throw std::overflow_error("Kirchhoff potential overflows at z = " + fmt(z));
  return eps * z + std::expm1(z) + (eps / m) * std::expm1(m * z) + std::expm1((m + 1.0) * z) / (m + 1.0);
}

std::vector<ViscosityPreset> viscosity_presets() {
  std::vector<ViscosityPreset> p;
  p.push_back({"identity", {{{{0.0, 0.0}, {0.0, 0.0}}}, {{{1.0, 0.0}, {0.0, 1.0}}}}});
  p.push_back({"weak coupling", {{{{0.5, -1.0}, {-1.0, 0.5}}}, {{{1.0, 0.5}, {0.5, 1.0}}}}});
  p.push_back({"strong coupling", {{{{0.0, -2.0}, {-2.0, 0.0}}}, {{{3.0, 1.0}, {1.0, 3.0}}}}});
  p.push_back({"nonsymmetric", {{{{1.0, -1.0}, {0.4, 0.0}}}, {{{2.0, 0.5}, {-0.3, 1.5}}}}});
  p.push_back({"negative bulk", {{{{-0.5, -0.4}, {-0.4, -0.5}}}, {{{1.5, 0.2}, {0.2, 1.5}}}}});
  return p;
}

}  // namespace bifluid
