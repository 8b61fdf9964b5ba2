// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bifluid/config.hpp"
#include "bifluid/continuation.hpp"
#include "bifluid/elliptic.hpp"
#include "bifluid/field_io.hpp"
#include "bifluid/lame.hpp"
#include "bifluid/run.hpp"
#include "bifluid/verification.hpp"

using namespace bifluid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (passed) detail << "first failure: " << what << "; ";
      passed = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Grid box(int n, int dim = 3) {
  const std::array<double, 3> e{1.0, 1.0, 1.0};
  const std::array<int, 3> c{n, n, n};
  return build_grid(dim, std::span<const double>(e.data(), dim), std::span<const int>(c.data(), dim));
}

bool close(double a, double b, double tol = 1e-10) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

Tensor3 random_tensor(std::mt19937& gen, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor3 t{};
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) t[a][b] = n(gen);
  return t;
}

VectorField random_smooth(const Grid& g, std::mt19937& gen, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(1, 3);
  VectorField w(g);
  for (int a = 0; a < g.dim; ++a) {
    const double c = amp * u(gen);
    const int kx = k(gen), ky = k(gen), kz = k(gen);
    const double ph = u(gen);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 x = g.center(i);
      w.comp(a)[i] = c * std::sin(kx * std::numbers::pi * x[0] + ph) * std::sin(ky * std::numbers::pi * x[1]) *
                     std::sin(kz * std::numbers::pi * x[2] + ph);
    }
  }
  return w;
}

// ---------------------------------------------------------------------------

Outcome constitutive_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const ViscosityMatrices id{{{{0.0, 0.0}, {0.0, 0.0}}}, {{{1.0, 0.0}, {0.0, 1.0}}}};

  MixtureParams p;
  ValidationReport r = validate(p, id);
  o.require(r.ok && std::all_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.passed; }),
            "gamma=4, m=4, identity viscosity all pass");
  o.require(close(m_threshold(4.0), 2.0 / 3.0 * 71.0 / 13.0) && m_threshold(4.0) < 4.0, "m threshold at gamma=4");
  ViscosityMatrices tri = id;
  tri.mu[0][1] = 1.0;
  tri.lambda[0][1] = -2.0;
  o.require(validate(p, tri).find("triangularity")->passed, "nu12 = 0 passes triangularity");
  MixtureParams low = p;
  low.gamma = 2.0;
  r = validate(low, id);
  o.require(!r.ok && !r.find("gamma threshold")->passed, "gamma=2 fails the gamma threshold");

  o.require(pressure(0.0, 5.0, 3.0) == 0.0, "pressure(0, 5, 3)");
  o.require(close(pressure(1.0, 0.5, 4.0), 1.5), "pressure(1, 0.5, 4)");
  o.require(close(pressure(2.0, 1.5, 3.0), 11.0), "pressure(2, 1.5, 3)");
  bool threw = false;
  try {
    pressure(-1.0, 1.0, 3.0);
  } catch (const std::domain_error&) {
    threw = true;
  }
  o.require(threw, "negative density raises a domain error");

  o.require(close(internal_energy(0.0, 1.0, 3.0), 1.0), "internal_energy(0, 1, 3)");
  o.require(close(total_energy(1.0, 0.0, 0.0, 3.0), 0.5), "total_energy(1, 0, 0, 3)");
  o.require(close(total_energy(2.0, 4.0, 1.0, 3.0), 5.0), "total_energy(2, 4, 1, 3)");

  auto tc = thermal_coefficients(1.0, 2.0);
  o.require(close(tc.k, 2.0) && close(tc.L, 2.0), "thermal_coefficients(1, 2)");
  tc = thermal_coefficients(2.0, 3.0);
  o.require(close(tc.k, 9.0) && close(tc.L, 5.0), "thermal_coefficients(2, 3)");
  tc = thermal_coefficients(1.0, 6.5);
  o.require(close(tc.k, 2.0) && close(tc.L, 2.0), "thermal_coefficients(1, 6.5)");

  const Vec3 v{0.3, -1.0, 2.0};
  o.require(momentum_exchange(v, v, 3.0, 1) == Vec3{0.0, 0.0, 0.0}, "equal velocities exchange nothing");
  o.require(momentum_exchange({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 2.0, 1) == Vec3{-2.0, 0.0, 0.0}, "J1 sign");
  std::mt19937 gen(42);
  std::normal_distribution<double> n;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a{n(gen), n(gen), n(gen)}, b{n(gen), n(gen), n(gen)};
    const Vec3 j1 = momentum_exchange(a, b, 1.3, 1), j2 = momentum_exchange(a, b, 1.3, 2);
    for (int d = 0; d < 3; ++d) o.require(j1[d] + j2[d] == 0.0, "exchange antisymmetry");
  }

  Tensor3 sym{{{1.0, 2.0, 3.0}, {2.0, 4.0, 5.0}, {3.0, 5.0, 6.0}}};
  o.require(strain_tensor(sym) == sym, "strain of a symmetric gradient");
  Tensor3 anti{{{0.0, 2.0, -1.0}, {-2.0, 0.0, 4.0}, {1.0, -4.0, 0.0}}};
  o.require(strain_tensor(anti) == Tensor3{}, "strain of an antisymmetric gradient");
  Tensor3 g01{};
  g01[0][1] = 1.0;
  const Tensor3 d01 = strain_tensor(g01);
  o.require(d01[0][1] == 0.5 && d01[1][0] == 0.5 && d01[0][0] == 0.0 && d01[1][1] == 0.0, "strain of [[0,1],[0,0]]");

  const ViscosityMatrices diag{{{{0.5, 0.0}, {0.0, 0.3}}}, {{{1.0, 0.0}, {0.0, 2.0}}}};
  o.require(viscous_stress(Tensor3{}, Tensor3{}, diag, 1) == Tensor3{}, "stress of zero gradients");
  o.require(viscous_stress(random_tensor(gen, 3), Tensor3{}, diag, 2) == Tensor3{}, "no cross coupling");
  Tensor3 eye{};
  for (int a = 0; a < 3; ++a) eye[a][a] = 1.0;
  const Tensor3 p1 = viscous_stress(Tensor3{}, eye, tri, 1);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) o.require(close(p1[a][b], a == b ? -4.0 : 0.0), "P1 = -4 I");

  o.require(entropy_production_density(Tensor3{}, Tensor3{}, diag) == 0.0, "zero gradients produce no entropy");
  Tensor3 shear{};
  shear[0][1] = 0.8;
  o.require(close(entropy_production_density(shear, Tensor3{}, diag), 2.0 * 1.0 * 2.0 * 0.4 * 0.4),
            "pure shear gives 2 mu |D|^2");
  double lo = INFINITY;
  const auto presets = viscosity_presets();
  o.require(presets.size() == 5, "five presets");
  for (const auto& pr : presets) {
    o.require(validate(p, pr.visc).ok && pr.visc.c0() > 0.0, "preset " + pr.name + " admissible");
    for (int k = 0; k < 10000; ++k)
      lo = std::min(lo, entropy_production_density(random_tensor(gen, 3), random_tensor(gen, 3), pr.visc));
  }
  o.require(lo >= -1e-12, "entropy production sampling");

  o.require(kirchhoff_potential(0.0, 0.5, 4.0) == 0.0, "Phi(0) = 0");
  o.require(kirchhoff_potential(-3.0, 0.5, 4.0) < 0.0 && kirchhoff_potential(3.0, 0.5, 4.0) > 0.0, "sign of Phi");
  // Composite Simpson oracle for the integral of (1 + e^{2y})(1 + e^y) over [0, 1].
  const int panels = 4000;
  const double h = 1.0 / panels;
  auto f = [](double y) { return (1.0 + std::exp(2.0 * y)) * (1.0 + std::exp(y)); };
  double simpson = f(0.0) + f(1.0);
  for (int k = 1; k < panels; ++k) simpson += (k % 2 ? 4.0 : 2.0) * f(k * h);
  simpson *= h / 3.0;
  o.require(std::abs(kirchhoff_potential(1.0, 1.0, 2.0) - simpson) <= 1e-10, "Phi(1) against quadrature");

  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "runtime under 10 s");
  o.detail << "min entropy production " << lo << ", " << secs << " s";
  return o;
}

Outcome coercivity() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g = box(16);
  std::mt19937 gen(2);
  std::normal_distribution<double> n;
  double worst = INFINITY;
  for (const auto& pr : viscosity_presets()) {
    const double c0 = pr.visc.c0();
    for (int trial = 0; trial < 100; ++trial) {
      VectorField u1(g), u2(g);
      // Alternate rough and smooth samples; the ghost layer enforces u = 0 on the boundary.
      if (trial % 2) {
        u1 = random_smooth(g, gen, 1.0);
        u2 = random_smooth(g, gen, 1.0);
      } else {
        for (int a = 0; a < 3; ++a)
          for (std::size_t c = 0; c < g.size(); ++c) {
            u1.comp(a)[c] = n(gen);
            u2.comp(a)[c] = n(gen);
          }
      }
      const double form = dot(apply_lame(u1, u2, pr.visc, 1), u1) + dot(apply_lame(u1, u2, pr.visc, 2), u2);
      const double s1 = h1_seminorm(u1, Ghost::DirichletZero), s2 = h1_seminorm(u2, Ghost::DirichletZero);
      const double semi = s1 * s1 + s2 * s2;
      worst = std::min(worst, form / (c0 * semi));
      o.require(form >= (c0 - 0.05 * c0) * semi, pr.name + " trial " + std::to_string(trial));
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime under 60 s");
  o.detail << "min form / (c0 |u|^2) = " << worst << ", " << secs << " s";
  return o;
}

Outcome subsolver_exactness() {
  Outcome o;
  LinearSolveSpec tight;
  tight.rel_tol = 1e-13;
  tight.max_iters = 20000;
  double r_const = 0.0, s_const = 0.0, u_zero = 0.0, mass_err = 0.0;
  for (int dim : {2, 3}) {
    const Grid g = box(10, dim);
    for (double eps : {1.0, 0.1}) {
      const auto sol = solve_continuity_R(VectorField(g), eps, 1.7, tight);
      for (double v : sol.r.data()) r_const = std::max(r_const, std::abs(v - 1.7));
      const auto faces = boundary_faces(g);
      const auto rs = solve_robin_S(Field(g), Field(g, 1.3), BoundaryField(faces.size(), eps * 0.6), eps, tight);
      for (double v : rs.z.data()) s_const = std::max(s_const, std::abs(v - 0.6));
    }
    for (const auto& pr : viscosity_presets()) {
      const auto us = solve_lame_U(VectorField(g), VectorField(g), pr.visc, tight);
      for (int a = 0; a < g.dim; ++a)
        for (std::size_t c = 0; c < g.size(); ++c)
          u_zero = std::max({u_zero, std::abs(us.h1.comp(a)[c]), std::abs(us.h2.comp(a)[c])});
    }
  }
  o.require(r_const <= 1e-10, "R reproduces the constant");
  o.require(s_const <= 1e-10, "S reproduces the constant");
  o.require(u_zero == 0.0, "U of zero data is zero");

  const Grid g = box(10);
  std::mt19937 gen(50);
  std::uniform_real_distribution<double> amp(0.1, 20.0), mass(0.1, 10.0);
  const std::array<double, 3> eps_choices{0.5, 0.1, 0.02};
  std::size_t negative = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double M = mass(gen);
    const auto r = solve_continuity_R(random_smooth(g, gen, amp(gen)), eps_choices[trial % 3], M).r;
    mass_err = std::max(mass_err, std::abs(integral(r) - M) / M);
    negative += static_cast<std::size_t>(std::count_if(r.data().begin(), r.data().end(), [](double v) { return v < 0.0; }));
  }
  o.require(mass_err <= 1e-8, "R mass identity");
  o.require(negative == 0, "R positivity");
  o.detail << "R const " << r_const << ", S const " << s_const << ", U zero " << u_zero << ", max rel mass error "
           << mass_err << ", negative cells " << negative;
  return o;
}

Outcome mms() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const VerificationSummary sum = run_verification_suite();
  o.require(sum.spot_checks_passed, "source spot checks");
  for (const auto& c : sum.checks) {
    std::cout << "    " << c.case_name << " " << c.target << " " << c.field << " order " << c.order << " (>= "
              << c.threshold << ")" << (c.exact ? " exact" : "") << (c.passed ? "" : " FAIL") << "\n";
    o.require(c.passed, c.case_name + " " + c.target + " " + c.field);
  }
  const double secs = seconds_since(t0);
  o.require(secs < 600.0, "runtime under 10 min");
  o.detail << sum.checks.size() << " order checks, " << secs << " s";
  return o;
}

RunConfig base_config(int cells) {
  RunConfig c;
  c.grid.cells = {cells, cells, cells};
  return c;
}

ContinuationResult continuation_run(const RunConfig& cfg) {
  Problem pb(cfg.build_grid(), cfg.mixture_params(), cfg.visc);
  pb.linear = cfg.linear;
  return run_epsilon_continuation(cfg.continuation, pb);
}

Outcome equilibrium() {
  Outcome o;
  RunConfig cfg = base_config(12);
  cfg.continuation.fp_tol = 1e-9;
  const ContinuationResult res = continuation_run(cfg);
  o.require(res.converged && res.states.size() == cfg.continuation.eps_schedule.size(), "every stage converged");
  o.require(res.rows.back().eps == 1.0 / 64.0, "sweep reaches eps = 1/64");
  double u_h1 = 0.0, s_l2 = 0.0, rho_dev = 0.0, resid = 0.0;
  for (std::size_t k = 0; k < res.states.size(); ++k) {
    const MixtureState& st = res.states[k];
    for (int i = 0; i < 2; ++i) {
      u_h1 = std::max(u_h1, w12_norm(st.u[i]));
      for (double r : st.rho[i].data()) rho_dev = std::max(rho_dev, std::abs(r - cfg.params.masses[i]));
    }
    s_l2 = std::max(s_l2, lp_norm(st.s, 2.0));
    const MonitorRow& row = res.rows[k];
    resid = std::max({resid, row.weak_H1, row.weak_H2, row.weak_H3, row.energy_identity, row.entropy_identity, row.kirchhoff_residual});
  }
  o.require(u_h1 <= 1e-5, "velocity H1 norm");
  o.require(s_l2 <= 1e-5, "entropy L2 norm");
  o.require(rho_dev <= 1e-6, "densities at M_i / |Omega|");
  o.require(resid <= 1e-6, "weak and identity residuals");
  o.detail << "max |u|_H1 " << u_h1 << ", |s|_L2 " << s_l2 << ", rho deviation " << rho_dev << ", residual " << resid;
  return o;
}

Outcome boundary_temperature_limit() {
  Outcome o;
  RunConfig cfg = base_config(8);
  cfg.params.theta_hat_value = 2.0;
  cfg.continuation.eps_schedule = {1.0, 0.25, 0.0625};
  const ContinuationResult res = continuation_run(cfg);
  o.require(res.converged, "every stage converged");
  std::vector<double> dev;
  for (const auto& st : res.states) {
    Field d(st.s.grid());
    for (std::size_t c = 0; c < d.size(); ++c) d[c] = std::exp(st.s[c]) - 2.0;
    dev.push_back(lp_norm(d, 2.0));
  }
  for (std::size_t k = 1; k < dev.size(); ++k) o.require(dev[k] < dev[k - 1], "strict decrease");
  o.detail << "|theta - 2|_L2:";
  for (double d : dev) o.detail << " " << d;
  return o;
}

/// Forced run shared by criteria 7-9.
struct ForcedRun {
  RunConfig cfg;
  ContinuationResult res;
};

const ForcedRun& forced_run() {
  static const ForcedRun run = [] {
    ForcedRun r;
    r.cfg = base_config(16);
    r.cfg.params.masses = {2.0, 2.0};
    r.cfg.params.forcing = "constant";
    r.cfg.params.forcing_magnitude = 0.1;
    r.cfg.params.forcing_axis = 2;
    r.res = continuation_run(r.cfg);
    return r;
  }();
  return run;
}

Outcome uniform_bounds() {
  Outcome o;
  const auto& fr = forced_run();
  o.require(fr.res.converged && fr.res.rows.size() == fr.cfg.continuation.eps_schedule.size(), "no stage diverges");
  const MonitorRow& first = fr.res.rows.front();
  auto norms = [](const MonitorRow& r) {
    return std::vector<double>{r.rho_L2gamma[0], r.rho_L2gamma[1], r.u_W12[0],        r.u_W12[1],
                               r.eps_grad_rho[0], r.eps_grad_rho[1], r.theta_L3m,     r.grad_theta_L2,
                               r.boundary_exp_s,  r.grad_s_L2,       r.theta_boundary_L2m};
  };
  const auto base = norms(first);
  double worst = 0.0;
  for (const auto& row : fr.res.rows) {
    const auto cur = norms(row);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      o.require(std::isfinite(cur[k]) && cur[k] <= 10.0 * base[k], "norm " + std::to_string(k) + " at eps " + std::to_string(row.eps));
      if (base[k] > 0.0) worst = std::max(worst, cur[k] / base[k]);
    }
  }
  o.detail << "largest norm ratio to eps = 1: " << worst << ", |u1|_W12 at eps = 1/64: " << fr.res.rows.back().u_W12[0];
  return o;
}

Outcome effective_flux_cauchy() {
  Outcome o;
  const auto& fr = forced_run();
  const auto& states = fr.res.states;
  o.require(states.size() >= 4, "at least four stages");
  if (states.size() < 4) return o;
  const MixtureParams p = fr.cfg.mixture_params();
  for (int i = 1; i <= 2; ++i) {
    std::vector<double> diff;
    for (std::size_t k = states.size() - 3; k < states.size(); ++k)
      diff.push_back(interior_l2_difference(effective_viscous_flux(states[k], fr.cfg.visc, p.gamma, i),
                                            effective_viscous_flux(states[k - 1], fr.cfg.visc, p.gamma, i)));
    for (std::size_t k = 1; k < diff.size(); ++k) o.require(diff[k] <= diff[k - 1], "F" + std::to_string(i) + " non-increasing");
    o.detail << "F" << i << ":";
    for (double d : diff) o.detail << " " << d;
    o.detail << (i == 1 ? "; " : "");
  }
  return o;
}

Outcome renormalized_trend() {
  Outcome o;
  const auto& fr = forced_run();
  const MonitorRow &first = fr.res.rows.front(), &last = fr.res.rows.back();
  o.require(last.eps == 1.0 / 64.0, "sweep reaches eps = 1/64");
  for (int i = 0; i < 2; ++i) {
    o.require(std::abs(last.renorm[i]) <= std::abs(first.renorm[i]), "component " + std::to_string(i + 1));
    o.detail << "i=" << i + 1 << ": " << std::abs(first.renorm[i]) << " -> " << std::abs(last.renorm[i])
             << (i == 0 ? "; " : "");
  }
  return o;
}

Outcome determinism_and_io() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "bifluid_acceptance";
  fs::remove_all(root);
  RunConfig cfg = base_config(8);
  cfg.params.forcing = "trig";
  cfg.params.forcing_magnitude = 0.1;
  cfg.params.theta_hat = "trig";
  cfg.params.theta_hat_amplitude = 0.3;
  cfg.continuation.eps_schedule = {1.0, 0.5, 0.25};
  std::ostringstream log;
  cfg.output.directory = (root / "a").string();
  const int sa = run(cfg, log);
  cfg.output.directory = (root / "b").string();
  const int sb = run(cfg, log);
  o.require(sa == kExitOk && sb == kExitOk, "both runs succeed");
  const std::string ma = read_file((root / "a" / "monitor.csv").string());
  o.require(ma == read_file((root / "b" / "monitor.csv").string()), "monitor CSVs byte-identical");

  std::mt19937 gen(10);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> expo(-30, 30);
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 ? 3 : 2;
    const Grid g = box(4 + trial % 3, dim);
    MixtureState st = equilibrium_state(g, MixtureParams{}, std::ldexp(1.0, -(trial % 7)), 0.5);
    auto fill = [&](std::vector<double>& v) {
      for (auto& x : v) x = std::ldexp(n(gen), expo(gen));
    };
    for (int i = 0; i < 2; ++i) {
      fill(st.rho[i].data());
      for (int a = 0; a < dim; ++a) fill(st.u[i].comp(a));
    }
    fill(st.s.data());
    const FieldFileFormat f = trial % 4 < 2 ? FieldFileFormat::Text : FieldFileFormat::Csv;
    const fs::path path = root / ("state" + std::to_string(trial));
    write_fields(st, path.string(), f);
    if (bitwise_equal(read_fields(path.string()), st) && bitwise_equal(parse_fields(format_fields(st, f)), st)) ++exact;
  }
  o.require(exact == 100, "bitwise round-trips");
  o.detail << "monitor CSV " << ma.size() << " bytes identical, " << exact << "/100 bitwise round-trips";
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"constitutive unit suite", constitutive_suite},
      {"coercivity of the discrete viscous form", coercivity},
      {"sub-solver exactness", subsolver_exactness},
      {"manufactured-solution convergence", mms},
      {"equilibrium fixed point", equilibrium},
      {"boundary-temperature limit", boundary_temperature_limit},
      {"eps-uniform boundedness", uniform_bounds},
      {"effective-flux Cauchy monitor", effective_flux_cauchy},
      {"renormalized-integral trend", renormalized_trend},
      {"determinism and I/O", determinism_and_io},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first << "): "
              << o.detail.str() << " [" << seconds_since(t0) << " s]" << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
