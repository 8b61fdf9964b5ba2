#include <doctest.h>

#include <cmath>
#include <random>

#include "bifluid/model.hpp"

using namespace bifluid;

namespace {

ViscosityMatrices identity_visc() { return {{{{0.0, 0.0}, {0.0, 0.0}}}, {{{1.0, 0.0}, {0.0, 1.0}}}}; }

Tensor3 random_tensor(std::mt19937& gen, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor3 t{};
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) t[a][b] = n(gen);
  return t;
}

// Simpson rule on [0, z] with n panels; the integrand is smooth.
double simpson(const std::function<double(double)>& f, double z, int n) {
  const double h = z / n;
  double s = f(0.0) + f(z);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("validation report") {
  MixtureParams p;
  ValidationReport r = validate(p, identity_visc());
  CHECK(r.ok);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.name);
  CHECK(m_threshold(4.0) == doctest::Approx(2.0 / 3.0 * 71.0 / 13.0).epsilon(1e-14));
  CHECK(m_threshold(4.0) == doctest::Approx(3.641).epsilon(1e-3));

  ViscosityMatrices v{{{{1.0, -2.0}, {-2.0, 1.0}}}, {{{3.0, 1.0}, {1.0, 3.0}}}};
  r = validate(p, v);
  CHECK(r.find("triangularity")->passed);

  p.gamma = 2.0;
  r = validate(p, identity_visc());
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.find("gamma threshold")->passed);
  p.allow_unproven = true;
  CHECK(validate(p, identity_visc()).ok);

  // Matrix conditions are never waived.
  ViscosityMatrices bad = identity_visc();
  bad.lambda[0][1] = 0.5;
  r = validate(p, bad);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.find("triangularity")->passed);
}

TEST_CASE("admissible presets") {
  MixtureParams p;
  CHECK(viscosity_presets().size() == 5);
  for (const auto& pr : viscosity_presets()) {
    CHECK_MESSAGE(validate(p, pr.visc).ok, pr.name);
    CHECK(pr.visc.c0() > 0.0);
  }
}

TEST_CASE("coercivity constant formula") {
  ViscosityMatrices v = identity_visc();
  v.mu = {{{3.0, 1.0}, {0.5, 2.0}}};
  const double expect = 0.5 * (5.0 - std::sqrt(1.0 + 2.25));
  CHECK(v.c0() == doctest::Approx(expect).epsilon(1e-15));
  // For symmetric M the formula is the smallest eigenvalue.
  v.mu = {{{3.0, 1.0}, {1.0, 3.0}}};
  CHECK(v.c0() == doctest::Approx(2.0));
}

TEST_CASE("pressure and energies") {
  CHECK(pressure(0.0, 5.0, 3.0) == 0.0);
  CHECK(pressure(1.0, 0.5, 4.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(pressure(2.0, 1.5, 3.0) == doctest::Approx(11.0).epsilon(1e-15));
  CHECK_THROWS_AS(pressure(-1.0, 1.0, 3.0), std::domain_error);

  CHECK(internal_energy(0.0, 1.0, 3.0) == 1.0);
  CHECK(total_energy(1.0, 0.0, 0.0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(total_energy(2.0, 4.0, 1.0, 3.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(internal_energy(1.0, 1.0, 1.0), std::domain_error);

  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double r1 = u(gen), r2 = r1 + u(gen), t1 = 0.01 + u(gen), t2 = t1 + u(gen);
    CHECK(pressure(r2, t1, 4.0) >= pressure(r1, t1, 4.0));
    CHECK(pressure(r1, t2, 4.0) >= pressure(r1, t1, 4.0));
    CHECK(internal_energy(r2, t1, 4.0) >= internal_energy(r1, t1, 4.0));
    CHECK(internal_energy(r1, t2, 4.0) >= internal_energy(r1, t1, 4.0));
  }
}

TEST_CASE("thermal coefficients") {
  auto c = thermal_coefficients(1.0, 2.0);
  CHECK(c.k == 2.0);
  CHECK(c.L == 2.0);
  c = thermal_coefficients(2.0, 3.0);
  CHECK(c.k == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(c.L == doctest::Approx(5.0).epsilon(1e-15));
  c = thermal_coefficients(1.0, 7.3);
  CHECK(c.k == 2.0);
  CHECK(c.L == 2.0);
  CHECK_THROWS_AS(thermal_coefficients(0.0, 2.0), std::domain_error);
}

TEST_CASE("momentum exchange") {
  const Vec3 u{0.3, -1.0, 2.0};
  for (int i = 1; i <= 2; ++i) CHECK(momentum_exchange(u, u, 3.0, i) == Vec3{0.0, 0.0, 0.0});
  CHECK(momentum_exchange({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 2.0, 1) == Vec3{-2.0, 0.0, 0.0});
  std::mt19937 gen(3);
  std::normal_distribution<double> n;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a{n(gen), n(gen), n(gen)}, b{n(gen), n(gen), n(gen)};
    const double s = std::abs(n(gen));
    const Vec3 j1 = momentum_exchange(a, b, s, 1), j2 = momentum_exchange(a, b, s, 2);
    for (int d = 0; d < 3; ++d) CHECK(j1[d] + j2[d] == 0.0);
  }
}

TEST_CASE("strain tensor") {
  Tensor3 sym{{{1.0, 2.0, 3.0}, {2.0, 4.0, 5.0}, {3.0, 5.0, 6.0}}};
  CHECK(strain_tensor(sym) == sym);
  Tensor3 anti{{{0.0, 2.0, -1.0}, {-2.0, 0.0, 4.0}, {1.0, -4.0, 0.0}}};
  CHECK(strain_tensor(anti) == Tensor3{});
  Tensor3 g{};
  g[0][1] = 1.0;
  const Tensor3 d = strain_tensor(g);
  CHECK(d[0][1] == 0.5);
  CHECK(d[1][0] == 0.5);
  CHECK(d[0][0] == 0.0);
}

TEST_CASE("viscous stress") {
  const ViscosityMatrices diag{{{{0.5, 0.0}, {0.0, 0.3}}}, {{{1.0, 0.0}, {0.0, 2.0}}}};
  std::mt19937 gen(11);
  CHECK(viscous_stress(Tensor3{}, Tensor3{}, diag, 1) == Tensor3{});
  CHECK(viscous_stress(random_tensor(gen, 3), Tensor3{}, diag, 2) == Tensor3{});

  ViscosityMatrices v = identity_visc();
  v.lambda[0][1] = -2.0;
  v.mu[0][1] = 1.0;
  Tensor3 id{};
  for (int a = 0; a < 3; ++a) id[a][a] = 1.0;
  const Tensor3 p = viscous_stress(Tensor3{}, id, v, 1);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(p[a][b] == doctest::Approx(a == b ? -4.0 : 0.0));
}

TEST_CASE("entropy production") {
  for (const auto& pr : viscosity_presets()) CHECK(entropy_production_density(Tensor3{}, Tensor3{}, pr.visc) == 0.0);

  // Pure shear with diagonal matrices: 2 mu_ii |D|^2.
  const ViscosityMatrices diag{{{{0.7, 0.0}, {0.0, 0.2}}}, {{{1.5, 0.0}, {0.0, 2.5}}}};
  Tensor3 g{};
  g[0][1] = 0.8;
  const double d2 = 2.0 * 0.4 * 0.4;
  CHECK(entropy_production_density(g, Tensor3{}, diag) == doctest::Approx(2.0 * 1.5 * d2));
  CHECK(entropy_production_density(Tensor3{}, g, diag) == doctest::Approx(2.0 * 2.5 * d2));

  std::mt19937 gen(2024);
  for (const auto& pr : viscosity_presets())
    for (int dim : {2, 3}) {
      double lo = INFINITY;
      for (int k = 0; k < 10000; ++k)
        lo = std::min(lo, entropy_production_density(random_tensor(gen, dim), random_tensor(gen, dim), pr.visc, dim));
      CHECK_MESSAGE(lo >= -1e-12, pr.name);
    }
}

TEST_CASE("Kirchhoff potential") {
  CHECK(kirchhoff_potential(0.0, 0.3, 4.0) == 0.0);
  CHECK(kirchhoff_potential(-3.0, 0.3, 4.0) < 0.0);
  CHECK(kirchhoff_potential(3.0, 0.3, 4.0) > 0.0);
  const double quad = simpson([](double y) { return (1.0 + std::exp(2.0 * y)) * (1.0 + std::exp(y)); }, 1.0, 2000);
  CHECK(std::abs(kirchhoff_potential(1.0, 1.0, 2.0) - quad) <= 1e-10);
  CHECK_THROWS_AS(kirchhoff_potential(200.0, 0.5, 4.0), std::overflow_error);

  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    double a = u(gen), b = u(gen);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(kirchhoff_potential(b, 0.1, 4.0) > kirchhoff_potential(a, 0.1, 4.0));
  }
}
