#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "bifluid/continuation.hpp"
#include "bifluid/field_io.hpp"
#include "bifluid/verification.hpp"

using namespace bifluid;

namespace {

Grid box(int n, int dim = 3) {
  const std::array<double, 3> e{1.0, 1.0, 1.0};
  const std::array<int, 3> c{n, n, n};
  return build_grid(dim, std::span<const double>(e.data(), dim), std::span<const int>(c.data(), dim));
}

ViscosityMatrices preset(const std::string& name) {
  for (const auto& p : viscosity_presets())
    if (p.name == name) return p.visc;
  throw std::invalid_argument(name);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const VectorField& v) {
  double m = 0.0;
  for (int a = 0; a < v.dim(); ++a) m = std::max(m, max_abs(v.comp(a)));
  return m;
}

MixtureState sample_case(const ManufacturedCase& mc, const Grid& g) {
  MixtureState st = equilibrium_state(g, mc.params, mc.eps);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const JetState f = mc.at(g.center(c));
    for (int i = 0; i < 2; ++i) {
      st.rho[i][c] = f.rho[i].v;
      st.u[i].set(c, {f.u[i][0].v, f.u[i][1].v, f.u[i][2].v});
    }
    st.s[c] = f.s.v;
  }
  return st;
}

}  // namespace

TEST_CASE("right-hand sides at the constant equilibrium") {
  const Grid g = box(8);
  MixtureParams p;
  p.masses = {1.3, 0.6};
  for (const auto& pr : viscosity_presets()) {
    const Problem pb(g, p, pr.visc);
    const MixtureState st = equilibrium_state(g, p, 0.25);
    for (int i = 1; i <= 2; ++i) CHECK(max_abs(assemble_G(i, pb, st)) <= 1e-10);
    CHECK(max_abs(assemble_D(pb, st).data()) <= 1e-10);
    for (double b : assemble_B(st.s, 0.25, p.m).data()) CHECK(b == doctest::Approx(4.0 * 1.25).epsilon(1e-15));
    for (double t : assemble_T(cell_trace(st.s), pb.theta_hat(), p.m)) CHECK(t == 0.0);
  }
}

TEST_CASE("forcing enters G as r f") {
  const Grid g = box(6);
  MixtureParams p;
  p.forcing = {[](const Vec3&) { return Vec3{0.0, 0.0, 0.1}; }, [](const Vec3&) { return Vec3{0.2, -0.1, 0.0}; }};
  const Problem pb(g, p, preset("identity"));
  const MixtureState st = equilibrium_state(g, p, 0.5);
  for (int i = 1; i <= 2; ++i) {
    const VectorField G = assemble_G(i, pb, st);
    for (std::size_t c = 0; c < g.size(); ++c)
      for (int a = 0; a < 3; ++a) CHECK(G.comp(a)[c] == doctest::Approx(st.rho[i - 1][c] * pb.forcing(i).at(c)[a]));
  }
}

TEST_CASE("friction vanishes for equal velocities") {
  const Grid g = box(6);
  const ManufacturedCase mc = manufactured_case("trig3d");
  MixtureState st = sample_case(mc, g);
  st.u[1] = st.u[0];
  MixtureParams p0 = mc.params, p1 = mc.params;
  p0.a = 0.0;
  p1.a = 5.0;
  const Field d0 = assemble_D(Problem(g, p0, mc.visc), st);
  const Field d1 = assemble_D(Problem(g, p1, mc.visc), st);
  CHECK(max_abs(d0.data()) > 0.0);
  for (std::size_t c = 0; c < g.size(); ++c) CHECK(d0[c] == doctest::Approx(d1[c]).epsilon(1e-14));
}

TEST_CASE("G and D converge to their exact values") {
  const ManufacturedCase mc = manufactured_case("trig2d");
  std::vector<double> eg, ed;
  for (int n : {16, 32, 64}) {
    const Grid g = box(n, 2);
    const Problem pb(g, mc.params, mc.visc);
    const MixtureState st = sample_case(mc, g);
    const VectorField G = assemble_G(1, pb, st);
    const Field D = assemble_D(pb, st);
    double sg = 0.0, sd = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
      // Boundary cells see the zero-flux pressure ghost, which is O(1) off when
      // theta has a normal derivative; consistency is an interior property.
      const auto q = g.ijk(c);
      if (q[0] == 0 || q[1] == 0 || q[0] == n - 1 || q[1] == n - 1) continue;
      const Vec3 x = g.center(c);
      const Vec3 ge = lame_image(mc, x, 1);
      const Vec3 src = momentum_source(mc, x, 1);
      for (int a = 0; a < 2; ++a) sg += std::pow(G.comp(a)[c] - (ge[a] - src[a]), 2);
      // D = -div(B grad s) - energy source.
      const JetState f = mc.at(x);
      const Jet B = 2.0 * (Jet(1.0) + exp(mc.params.m * f.s)) * (Jet(mc.eps) + exp(f.s));
      double div = 0.0;
      for (int a = 0; a < 2; ++a) div += (B * partial(f.s, a)).g[a];
      sd += std::pow(D[c] - (-div - energy_source(mc, x)), 2);
    }
    eg.push_back(std::sqrt(sg * g.cell_volume()));
    ed.push_back(std::sqrt(sd * g.cell_volume()));
  }
  CHECK(std::log2(eg[1] / eg[2]) >= 1.5);
  CHECK(std::log2(ed[1] / ed[2]) >= 1.5);
}

TEST_CASE("Psi at the equilibrium and its response to forcing") {
  const Grid g = box(8);
  MixtureParams p;
  const Problem pb(g, p, preset("weak coupling"));
  const MixtureState st = equilibrium_state(g, p, 0.5);
  const PsiResult r = apply_Psi(pb, st);
  CHECK(max_abs(r.h[0]) <= 1e-10);
  CHECK(max_abs(r.h[1]) <= 1e-10);
  CHECK(max_abs(r.z.data()) <= 1e-10);

  auto response = [&](double f) {
    MixtureParams q;
    q.forcing = {[f](const Vec3&) { return Vec3{0.0, 0.0, f}; }, [f](const Vec3&) { return Vec3{f, 0.0, 0.0}; }};
    const Problem pf(g, q, preset("weak coupling"));
    const PsiResult out = apply_Psi(pf, equilibrium_state(g, q, 0.5));
    return fixed_point_norm(out.h, out.z);
  };
  const double a = response(1e-3), b = response(2e-3);
  CHECK(a > 0.0);
  CHECK(b / a == doctest::Approx(2.0).epsilon(1e-6));

  MixtureState hot = st;
  for (auto& v : hot.s.data()) v = 400.0;
  CHECK_THROWS_AS(apply_Psi(pb, hot), DivergenceError);
}

TEST_CASE("homotopy returns to the equilibrium from a perturbed start") {
  const Grid g = box(8);
  MixtureParams p;
  const Problem pb(g, p, preset("identity"));
  MixtureState init = equilibrium_state(g, p, 0.5);
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 3; ++a)
      for (auto& v : init.u[i].comp(a)) v = u(gen);
  for (auto& v : init.s.data()) v = u(gen);

  ContinuationConfig cfg;
  cfg.fp_tol = 1e-8;
  const HomotopyResult r = solve_lambda_homotopy(pb, init, cfg, 0.5);
  REQUIRE(r.converged);
  for (int i = 0; i < 2; ++i) {
    CHECK(w12_norm(r.state.u[i]) <= 1e-5);
    CHECK(std::abs(integral(r.state.rho[i]) - p.masses[i]) <= 1e-8 * p.masses[i]);
    for (double v : r.state.rho[i].data()) CHECK(v >= 0.0);
  }
  CHECK(lp_norm(r.state.s, 2.0) <= 1e-5);

  // Damping changes the path but not the fixed point (forced problem).
  MixtureParams pf;
  pf.forcing = {[](const Vec3&) { return Vec3{0.0, 0.0, 0.05}; }, [](const Vec3&) { return Vec3{0.0, 0.0, 0.05}; }};
  const Problem pbf(g, pf, preset("identity"));
  cfg.fp_tol = 1e-9;
  cfg.damping = 0.5;
  const HomotopyResult h5 = solve_lambda_homotopy(pbf, equilibrium_state(g, pf, 0.5), cfg, 0.5);
  cfg.damping = 1.0;
  const HomotopyResult h10 = solve_lambda_homotopy(pbf, equilibrium_state(g, pf, 0.5), cfg, 0.5);
  REQUIRE(h5.converged);
  REQUIRE(h10.converged);
  std::array<VectorField, 2> du{h5.state.u[0], h5.state.u[1]};
  Field ds = h5.state.s;
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 3; ++a) kernels::axpy(-1.0, h10.state.u[i].comp(a), du[i].comp(a));
  kernels::axpy(-1.0, h10.state.s.values(), ds.values());
  // Same normalization as the stopping rule.
  const double scale = std::max(fixed_point_norm(h5.state.u, h5.state.s), 1.0);
  CHECK(fixed_point_norm(du, ds) <= 10.0 * cfg.fp_tol * scale);
}

TEST_CASE("inadmissible viscosity and bad schedules are rejected") {
  const Grid g = box(6);
  MixtureParams p;
  ViscosityMatrices bad{{{{0.0, 0.0}, {0.0, 0.0}}}, {{{1.0, 2.0}, {2.0, 1.0}}}};
  const Problem pb(g, p, bad);
  ContinuationConfig cfg;
  CHECK_THROWS_AS(solve_lambda_homotopy(pb, equilibrium_state(g, p, 0.5), cfg, 0.5), std::invalid_argument);
  cfg.lambda_schedule = {0.5, 0.25, 1.0};
  CHECK_FALSE(cfg.violations().empty());
  cfg = {};
  cfg.eps_schedule = {0.5, 1.0};
  CHECK_FALSE(cfg.violations().empty());
  cfg = {};
  cfg.damping = 0.0;
  CHECK_FALSE(cfg.violations().empty());
}

TEST_CASE("continuation is deterministic") {
  const Grid g = box(6);
  MixtureParams p;
  p.forcing = {[](const Vec3&) { return Vec3{0.0, 0.0, 0.1}; }, [](const Vec3&) { return Vec3{0.0, 0.0, 0.1}; }};
  ContinuationConfig cfg;
  cfg.eps_schedule = {1.0, 0.5};
  const auto a = run_epsilon_continuation(cfg, p, preset("identity"), g);
  const auto b = run_epsilon_continuation(cfg, p, preset("identity"), g);
  REQUIRE(a.converged);
  REQUIRE(a.states.size() == 2);
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(bitwise_equal(a.states[k], b.states[k]));
    const auto va = monitor_values(a.rows[k]), vb = monitor_values(b.rows[k]);
    CHECK(std::memcmp(va.data(), vb.data(), va.size() * sizeof(double)) == 0);
  }
}
